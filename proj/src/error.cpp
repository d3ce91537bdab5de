#include "gridtrend/error.hpp"

namespace gridtrend {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return "input-error";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Numeric: return "numeric-error";
    case ErrorKind::Data: return "data-error";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::Io: return "io-error";
  }
  return "error";
}

}  // namespace gridtrend
