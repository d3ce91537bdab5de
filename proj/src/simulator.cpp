#include "gridtrend/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gridtrend/aggregation.hpp"
#include "gridtrend/critical_values.hpp"
#include "gridtrend/error.hpp"
#include "gridtrend/unit_root.hpp"

namespace gridtrend {

namespace {

void check_law(const NormalLaw& law, const std::string& name) {
  if (!std::isfinite(law.mean) || !std::isfinite(law.sd) || law.sd < 0.0) {
    throw ConfigError(name + ": need a finite mean and a finite sd >= 0");
  }
}

void check_sizes(std::size_t n1, std::size_t n2, std::size_t periods) {
  if (n1 + n2 == 0) throw ConfigError("n1 + n2 must be positive");
  if (periods < 25) throw ConfigError("periods must be at least 25");
}

class Draws {
 public:
  explicit Draws(Rng& rng) : rng_(rng) {}
  double normal(const NormalLaw& law) { return law.mean + law.sd * z_(rng_); }
  double uniform() { return u_(rng_); }
  Rng& engine() { return rng_; }

 private:
  Rng& rng_;
  std::normal_distribution<double> z_{0.0, 1.0};
  std::uniform_real_distribution<double> u_{0.0, 1.0};
};

double clamp_rho(double rho, std::size_t& clamps) {
  if (rho > kRhoBound) {
    ++clamps;
    return kRhoBound;
  }
  if (rho < -kRhoBound) {
    ++clamps;
    return -kRhoBound;
  }
  return rho;
}

struct RowCore {
  double intercept;
  double slope;
  double rho;
};

// Intercept, slope and rho per row, then AR(1) noise for all rows started
// from the stationary distribution. Shared by both DGPs so that the broken
// DGP nests the linear one draw for draw.
std::vector<RowCore> draw_core(std::size_t n1, std::size_t n2, std::size_t T,
                               const NormalLaw (&g1)[3], const NormalLaw (&g2)[3],
                               const NormalLaw& noise, Draws& d, SimulatedPanel& out) {
  const std::size_t N = n1 + n2;
  std::vector<RowCore> core(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& g = i < n1 ? g1 : g2;
    core[i].intercept = d.normal(g[0]);
    core[i].slope = d.normal(g[1]);
    core[i].rho = clamp_rho(d.normal(g[2]), out.rho_clamps);
  }
  out.n1 = n1;
  out.n2 = n2;
  out.periods = T;
  out.values.assign(N * T, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double rho = core[i].rho;
    double* e = out.values.data() + i * T;
    e[0] = d.normal(noise) / std::sqrt(1.0 - rho * rho);
    for (std::size_t t = 1; t < T; ++t) e[t] = rho * e[t - 1] + d.normal(noise);
  }
  return core;
}

std::vector<std::size_t> sample_without_replacement(std::size_t first, std::size_t count,
                                                    std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(count);
  std::iota(pool.begin(), pool.end(), first);
  // Partial Fisher-Yates.
  for (std::size_t j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, count - 1);
    std::swap(pool[j], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream,
                std::uint64_t attempt) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed),   hi(seed),   lo(replication), hi(replication),
                    lo(stream), hi(stream), lo(attempt),     hi(attempt)};
  return Rng(seq);
}

void LinearDgpConfig::validate() const {
  check_sizes(n1, n2, periods);
  check_law(group1.beta0, "linear.group1.beta0");
  check_law(group1.beta1, "linear.group1.beta1");
  check_law(group1.rho, "linear.group1.rho");
  check_law(group2.beta0, "linear.group2.beta0");
  check_law(group2.beta1, "linear.group2.beta1");
  check_law(group2.rho, "linear.group2.rho");
  check_law(noise, "noise");
}

void BreakDgpConfig::validate() const {
  check_sizes(n1, n2, periods);
  for (int g = 1; g <= 2; ++g) {
    const auto& laws = g == 1 ? group1 : group2;
    const std::string p = "break.group" + std::to_string(g) + ".";
    check_law(laws.alpha0, p + "alpha0");
    check_law(laws.alpha1, p + "alpha1");
    check_law(laws.gamma1, p + "gamma1");
    check_law(laws.gamma2, p + "gamma2");
    check_law(laws.rho, p + "rho");
    if (!(laws.break_lo > 0.0 && laws.break_lo <= laws.break_hi && laws.break_hi < 1.0)) {
      throw ConfigError(p + "break range must satisfy 0 < break_lo <= break_hi < 1");
    }
    const auto lo = static_cast<std::size_t>(std::ceil(laws.break_lo * periods));
    const auto hi = static_cast<std::size_t>(std::floor(laws.break_hi * periods));
    if (lo > hi || lo < 1 || hi >= periods) {
      throw ConfigError(p + "break range holds no admissible date for " +
                        std::to_string(periods) + " periods");
    }
  }
  check_law(noise, "noise");
}

GridPanel SimulatedPanel::to_grid_panel(int first_year) const {
  GridPanel panel(first_year, periods);
  const std::vector<std::uint8_t> all(periods, 1);
  for (std::size_t i = 0; i < rows(); ++i) {
    GridMeta meta;
    meta.grid_id = i < n1 ? "g1-" + std::to_string(i + 1) : "g2-" + std::to_string(i - n1 + 1);
    meta.lat = std::nan("");
    meta.lon = std::nan("");
    panel.add_row(std::move(meta), row(i), all);
  }
  return panel;
}

SimulatedPanel simulate_linear_panel(const LinearDgpConfig& cfg, Rng& rng) {
  cfg.validate();
  Draws d(rng);
  SimulatedPanel out;
  const NormalLaw g1[3] = {cfg.group1.beta0, cfg.group1.beta1, cfg.group1.rho};
  const NormalLaw g2[3] = {cfg.group2.beta0, cfg.group2.beta1, cfg.group2.rho};
  const auto core = draw_core(cfg.n1, cfg.n2, cfg.periods, g1, g2, cfg.noise, d, out);
  const std::size_t T = cfg.periods;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* y = out.values.data() + i * T;
    for (std::size_t t = 0; t < T; ++t) {
      y[t] = core[i].intercept + core[i].slope * static_cast<double>(t + 1) + y[t];
    }
  }
  return out;
}

SimulatedPanel simulate_broken_panel(const BreakDgpConfig& cfg, Rng& rng) {
  cfg.validate();
  Draws d(rng);
  SimulatedPanel out;
  const NormalLaw g1[3] = {cfg.group1.alpha0, cfg.group1.gamma1, cfg.group1.rho};
  const NormalLaw g2[3] = {cfg.group2.alpha0, cfg.group2.gamma1, cfg.group2.rho};
  const auto core = draw_core(cfg.n1, cfg.n2, cfg.periods, g1, g2, cfg.noise, d, out);
  const std::size_t T = cfg.periods;
  out.break_index.resize(out.rows());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto& laws = i < cfg.n1 ? cfg.group1 : cfg.group2;
    const double a1 = d.normal(laws.alpha1);
    const double g2s = d.normal(laws.gamma2);
    std::uniform_int_distribution<std::size_t> date(
        static_cast<std::size_t>(std::ceil(laws.break_lo * T)),
        static_cast<std::size_t>(std::floor(laws.break_hi * T)));
    const std::size_t tb = date(d.engine());
    out.break_index[i] = tb;
    double* y = out.values.data() + i * T;
    for (std::size_t t = 0; t < T; ++t) {
      const double tt = static_cast<double>(t + 1);
      const double du = t + 1 > tb ? 1.0 : 0.0;
      const double dt = t + 1 > tb ? tt - static_cast<double>(tb) : 0.0;
      y[t] = core[i].intercept + a1 * du + core[i].slope * tt + g2s * dt + y[t];
    }
  }
  return out;
}

std::string alternative_label(Alternative a) {
  switch (a) {
    case Alternative::Alt1: return "1";
    case Alternative::Alt1Star: return "1*";
    case Alternative::Alt2: return "2";
    case Alternative::Alt2Star: return "2*";
  }
  return "?";
}

Alternative parse_alternative(const std::string& label) {
  for (auto a : kAllAlternatives) {
    if (alternative_label(a) == label) return a;
  }
  throw ConfigError("unknown alternative '" + label + "' (expected 1, 1*, 2 or 2*)");
}

bool is_star(Alternative a) { return a == Alternative::Alt1Star || a == Alternative::Alt2Star; }

void ObservationConfig::validate() const {
  for (const auto& row : transition) {
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("transition probabilities must lie in [0, 1]");
    }
    if (std::abs(row[0] + row[1] - 1.0) > 1e-12) {
      throw ConfigError("transition matrix rows must sum to 1");
    }
  }
  if (!(initial_observed_fraction > 0.0 && initial_observed_fraction <= 1.0)) {
    throw ConfigError("initial_observed_fraction must lie in (0, 1]");
  }
}

std::size_t ObservationMatrix::entry_time(std::size_t i) const {
  for (std::size_t t = 0; t < periods; ++t) {
    if (at(i, t)) return t + 1;
  }
  return periods + 1;
}

double ObservationMatrix::mean_entry_time(int group) const {
  const std::size_t lo = group == 1 ? 0 : n1;
  const std::size_t hi = group == 1 ? n1 : n1 + n2;
  if (lo == hi) throw InputError("group " + std::to_string(group) + " is empty");
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) sum += static_cast<double>(entry_time(i));
  return sum / static_cast<double>(hi - lo);
}

ObservationMatrix simulate_observation(const ObservationConfig& obs, std::size_t n1,
                                       std::size_t n2, std::size_t periods, Rng& rng) {
  obs.validate();
  const std::size_t N = n1 + n2;
  if (N == 0 || periods == 0) throw InputError("empty panel");
  const std::size_t t_star = obs.resolved_t_star(periods);
  if (t_star < 1 || t_star > periods) {
    throw ConfigError("t_star must lie in 1.." + std::to_string(periods));
  }

  const auto k = static_cast<std::size_t>(std::llround(obs.initial_observed_fraction *
                                                       static_cast<double>(N)));
  std::vector<std::size_t> initial;
  if (is_star(obs.alternative)) {
    if (k <= n1) {
      initial = sample_without_replacement(0, n1, k, rng);
    } else {
      initial.resize(n1);
      std::iota(initial.begin(), initial.end(), std::size_t{0});
      const auto extra = sample_without_replacement(n1, n2, k - n1, rng);
      initial.insert(initial.end(), extra.begin(), extra.end());
    }
  } else {
    initial = sample_without_replacement(0, N, k, rng);
  }
  std::vector<std::uint8_t> start(N, 0);
  for (auto i : initial) start[i] = 1;

  ObservationMatrix m;
  m.n1 = n1;
  m.n2 = n2;
  m.periods = periods;
  m.observed.assign(N * periods, 0);

  if (obs.alternative == Alternative::Alt1 || obs.alternative == Alternative::Alt1Star) {
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t from = start[i] ? 0 : t_star - 1;
      for (std::size_t t = from; t < periods; ++t) m.observed[i * periods + t] = 1;
    }
    return m;
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p_enter = obs.transition[0][1];
  const double p_leave = obs.absorbing ? 0.0 : obs.transition[1][0];
  std::vector<std::uint8_t> state = start;
  for (std::size_t t = 0; t < periods; ++t) {
    if (t > 0) {
      for (std::size_t i = 0; i < N; ++i) {
        const double draw = u(rng);
        if (state[i]) {
          if (draw < p_leave) state[i] = 0;
        } else if (draw < p_enter) {
          state[i] = 1;
        }
      }
    }
    for (std::size_t i = 0; i < N; ++i) m.observed[i * periods + t] = state[i];
  }
  return m;
}

PanelView make_view(const SimulatedPanel& panel, const ObservationMatrix& obs) {
  if (panel.rows() != obs.rows() || panel.periods != obs.periods) {
    throw InputError("panel and observation matrix differ in shape");
  }
  return {panel.values, obs.observed, panel.rows(), panel.periods};
}

std::vector<double> alt2_expected_share(const ObservationConfig& obs, std::size_t periods) {
  obs.validate();
  const double enter = obs.transition[0][1];
  const double leave = obs.absorbing ? 0.0 : obs.transition[1][0];
  std::vector<double> share(periods);
  double p = obs.initial_observed_fraction;
  for (std::size_t t = 0; t < periods; ++t) {
    if (t > 0) p = p * (1.0 - leave) + (1.0 - p) * enter;
    share[t] = p;
  }
  return share;
}

void ExperimentConfig::validate() const {
  if (replications == 0) throw ConfigError("replications must be positive");
  linear.validate();
  broken.validate();
  observation.validate();
  for (std::size_t T : {linear.periods, broken.periods}) {
    const auto ts = observation.resolved_t_star(T);
    if (ts < 1 || ts > T) throw ConfigError("t_star must lie in 1.." + std::to_string(T));
  }
  if (alternatives.empty()) throw ConfigError("observation.alternatives is empty");
  try {
    check_level(tests.level);
  } catch (const InputError& e) {
    throw ConfigError(std::string("tests.level: ") + e.what());
  }
  if (!(tests.trimming > 0.0 && tests.trimming <= 0.25)) {
    throw ConfigError("tests.trimming must lie in (0, 0.25]");
  }
  if (tests.max_lag && *tests.max_lag < 0) throw ConfigError("tests.max_lag must be >= 0");
  if (sweep.fractions.empty()) throw ConfigError("sweep.fractions is empty");
  for (double f : sweep.fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep fractions must lie in (0, 1]");
  }
  if (!std::is_sorted(sweep.fractions.begin(), sweep.fractions.end())) {
    throw ConfigError("sweep fractions must be ascending");
  }
}

namespace {

constexpr std::uint64_t kPanelStream = 0;
constexpr std::uint64_t kSweepStreamBase = 100;
// Retries before an alternative that keeps leaving Method B empty is an error.
constexpr std::uint64_t kMaxAttempts = 1000;

struct Aggregates {
  std::vector<double> a;
  std::vector<double> b;
  std::size_t redraws = 0;
  std::size_t always_observed = 0;
};

Aggregates observe_and_aggregate(const SimulatedPanel& panel, ObservationConfig obs,
                                 std::uint64_t seed, std::uint64_t rep, std::uint64_t stream) {
  Aggregates out;
  for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = make_stream(seed, rep, stream, attempt);
    const auto m = simulate_observation(obs, panel.n1, panel.n2, panel.periods, rng);
    const auto view = make_view(panel, m);
    const auto rows = always_observed_rows(view);
    auto a = method_a_values(view, {}, Summation::RowOrder);
    const bool a_ok = std::none_of(a.begin(), a.end(), [](double v) { return std::isnan(v); });
    if (rows.empty() || !a_ok) {
      ++out.redraws;
      continue;
    }
    out.a = std::move(a);
    out.b = subset_mean_values(view, rows, {}, Summation::RowOrder);
    out.always_observed = rows.size();
    return out;
  }
  throw DataError("alternative " + alternative_label(obs.alternative) +
                  " left no always-observed series after " + std::to_string(kMaxAttempts) +
                  " draws in replication " + std::to_string(rep));
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

// Runs job(r) for r in [0, n) on the worker pool; rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t n, unsigned workers, Job job) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (!failed.load()) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n) return;
      try {
        job(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned w = worker_count(workers, n);
  if (w <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < w; ++i) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", 100.0 * p);
  return buf;
}

}  // namespace

RejectionTable run_experiment(const ExperimentConfig& cfg, DgpKind dgp) {
  cfg.validate();
  const std::size_t R = cfg.replications;
  const std::size_t nalt = cfg.alternatives.size();
  const std::size_t T = dgp == DgpKind::Linear ? cfg.linear.periods : cfg.broken.periods;

  AdfOptions adf_opts;
  adf_opts.max_lag = cfg.tests.max_lag;
  adf_opts.level = cfg.tests.level;
  KpOptions kp_opts;
  kp_opts.max_lag = cfg.tests.max_lag;
  kp_opts.level = cfg.tests.level;
  kp_opts.trimming = cfg.tests.trimming;

  // outcome[r][alt][col]: 1 = unit root not rejected.
  std::vector<std::uint8_t> outcome(R * nalt * 4, 0);
  std::vector<std::size_t> redraws(R, 0), clamps(R, 0);

  parallel_for(R, cfg.workers, [&](std::size_t r) {
    Rng panel_rng = make_stream(cfg.seed, r, kPanelStream);
    const SimulatedPanel panel = dgp == DgpKind::Linear
                                     ? simulate_linear_panel(cfg.linear, panel_rng)
                                     : simulate_broken_panel(cfg.broken, panel_rng);
    clamps[r] = panel.rho_clamps;
    for (std::size_t j = 0; j < nalt; ++j) {
      ObservationConfig obs = cfg.observation;
      obs.alternative = cfg.alternatives[j];
      const auto stream = 1 + static_cast<std::uint64_t>(obs.alternative);
      const auto agg = observe_and_aggregate(panel, obs, cfg.seed, r, stream);
      redraws[r] += agg.redraws;
      std::uint8_t* cell = outcome.data() + (r * nalt + j) * 4;
      cell[0] = !adf_test(std::span<const double>(agg.a), adf_opts).reject;
      cell[1] = !kp_test(std::span<const double>(agg.a), kp_opts).reject;
      cell[2] = !adf_test(std::span<const double>(agg.b), adf_opts).reject;
      cell[3] = !kp_test(std::span<const double>(agg.b), kp_opts).reject;
    }
  });

  RejectionTable table;
  table.title = dgp == DgpKind::Linear ? "linear-trend DGP: unit-root non-rejection rates"
                                       : "broken-trend DGP: unit-root non-rejection rates";
  table.columns = {"A_ADF", "A_KP", "B_ADF", "B_KP"};
  for (auto a : cfg.alternatives) table.rows.push_back(alternative_label(a));
  table.counts.assign(nalt, std::vector<std::size_t>(4, 0));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < nalt; ++j) {
      for (std::size_t c = 0; c < 4; ++c) table.counts[j][c] += outcome[(r * nalt + j) * 4 + c];
    }
  }
  table.replications = R;
  table.seed = cfg.seed;
  table.config_hash = config_hash(cfg);
  table.notes = {
      {"periods", std::to_string(T)},
      {"t_star", std::to_string(cfg.observation.resolved_t_star(T))},
      {"level", percent(cfg.tests.level / 100.0) + "%"},
      {"absorbing", cfg.observation.absorbing ? "true" : "false"},
      {"empty_subset_redraws", std::to_string(std::accumulate(redraws.begin(), redraws.end(),
                                                              std::size_t{0}))},
      {"rho_clamps", std::to_string(std::accumulate(clamps.begin(), clamps.end(),
                                                    std::size_t{0}))},
  };
  return table;
}

RejectionTable methodb_signal_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t R = cfg.replications;
  const std::size_t nf = cfg.sweep.fractions.size();

  AdfOptions adf_opts;
  adf_opts.max_lag = cfg.tests.max_lag;
  adf_opts.level = cfg.tests.level;

  std::vector<std::uint8_t> outcome(R * nf * 2, 0);
  std::vector<std::size_t> redraws(R, 0);

  parallel_for(R, cfg.workers, [&](std::size_t r) {
    Rng panel_rng = make_stream(cfg.seed, r, kPanelStream);
    const auto panel = simulate_broken_panel(cfg.broken, panel_rng);
    for (std::size_t j = 0; j < nf; ++j) {
      ObservationConfig obs = cfg.observation;
      obs.alternative = cfg.sweep.alternative;
      obs.initial_observed_fraction = cfg.sweep.fractions[j];
      const auto agg = observe_and_aggregate(panel, obs, cfg.seed, r, kSweepStreamBase + j);
      redraws[r] += agg.redraws;
      std::uint8_t* cell = outcome.data() + (r * nf + j) * 2;
      cell[0] = !adf_test(std::span<const double>(agg.b), adf_opts).reject;
      cell[1] = !adf_test(std::span<const double>(agg.a), adf_opts).reject;
    }
  });

  RejectionTable table;
  table.title = "broken-trend DGP, alternative " + alternative_label(cfg.sweep.alternative) +
                ": ADF non-rejection by initial observed fraction";
  table.columns = {"B_ADF", "A_ADF"};
  table.counts.assign(nf, std::vector<std::size_t>(2, 0));
  for (std::size_t j = 0; j < nf; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", cfg.sweep.fractions[j]);
    table.rows.emplace_back(buf);
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < nf; ++j) {
      for (std::size_t c = 0; c < 2; ++c) table.counts[j][c] += outcome[(r * nf + j) * 2 + c];
    }
  }
  table.replications = R;
  table.seed = cfg.seed;
  table.config_hash = config_hash(cfg);
  table.notes = {
      {"periods", std::to_string(cfg.broken.periods)},
      {"t_star", std::to_string(cfg.observation.resolved_t_star(cfg.broken.periods))},
      {"level", percent(cfg.tests.level / 100.0) + "%"},
      {"empty_subset_redraws", std::to_string(std::accumulate(redraws.begin(), redraws.end(),
                                                              std::size_t{0}))},
  };
  return table;
}

std::string RejectionTable::to_delimited() const {
  std::ostringstream out;
  out << "# " << title << '\n';
  out << "# seed: " << seed << '\n';
  out << "# config_sha256: " << config_hash << '\n';
  out << "# replications: " << replications << '\n';
  for (const auto& [k, v] : notes) out << "# " << k << ": " << v << '\n';
  out << "row";
  for (const auto& c : columns) out << '\t' << c;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i];
    for (std::size_t j = 0; j < columns.size(); ++j) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", cell(i, j));
      out << '\t' << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string RejectionTable::to_aligned() const {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"row"});
  for (const auto& c : columns) grid.back().push_back(c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    grid.push_back({rows[i]});
    for (std::size_t j = 0; j < columns.size(); ++j) grid.back().push_back(percent(cell(i, j)));
  }
  std::vector<std::size_t> width(columns.size() + 1, 0);
  for (const auto& line : grid) {
    for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
  }
  std::ostringstream out;
  out << title << " (%)\n";
  out << "seed " << seed << ", " << replications << " replications, config sha256 "
      << config_hash << '\n';
  for (const auto& [k, v] : notes) out << k << ": " << v << '\n';
  for (const auto& line : grid) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      if (j == 0) {
        out << line[j] << std::string(width[j] - line[j].size(), ' ');
      } else {
        out << "  " << std::string(width[j] - line[j].size(), ' ') << line[j];
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<double> isotonic_fit(std::span<const double> y) {
  struct Block {
    double sum;
    std::size_t n;
  };
  std::vector<Block> blocks;
  for (double v : y) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.n <= b.sum / b.n) break;
      a.sum += b.sum;
      a.n += b.n;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.n, b.sum / b.n);
  return out;
}

}  // namespace gridtrend
