#include "driftbound/experiments.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>

#include "driftbound/bounds.hpp"
#include "driftbound/drifts.hpp"
#include "driftbound/metrics.hpp"
#include "driftbound/rng.hpp"
#include "driftbound/samplers.hpp"
#include "driftbound/targets.hpp"

namespace driftbound {

unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace {

unsigned resolve_threads(unsigned t) { return t == 0 ? default_thread_count() : t; }

struct Spread {
  double mean = 0.0;
  double sd = 0.0;
};

Spread spread(const std::vector<double>& xs) {
  Spread s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::string u64_str(std::uint64_t x) { return std::to_string(x); }

// n distinct indices from [0, m) by a partial Fisher–Yates shuffle.
std::vector<Eigen::Index> choose_without_replacement(Eigen::Index m, Eigen::Index n, Rng& rng) {
  require(n <= m, "choose_without_replacement: n exceeds population");
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto span = static_cast<double>(m - i);
    auto j = i + static_cast<Eigen::Index>(std::floor(uniform01(rng) * span));
    if (j >= m) j = m - 1;
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(n));
  return pool;
}

nlohmann::json bound_json(const std::string& formula, std::map<std::string, double> inputs,
                          std::optional<double> value, const std::string& provenance) {
  return to_json(BoundRecord{formula, std::move(inputs), value, provenance});
}

}  // namespace

// ------------------------------------------------------------ ResultTable

void ResultTable::add_row(std::vector<std::string> row) {
  require(row.size() == columns.size(), "ResultTable: row width does not match the header");
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw InvalidArgument("ResultTable: no column '" + name + "'");
}

const std::string& ResultTable::cell(std::size_t row, const std::string& column) const {
  require(row < rows.size(), "ResultTable: row out of range");
  return rows[row][column_index(column)];
}

std::optional<double> ResultTable::number(std::size_t row, const std::string& column) const {
  const std::string& c = cell(row, column);
  if (c == "none") return std::nullopt;
  return parse_double(c, column);
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  if (!out) throw ConfigError("error writing " + path.string());
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ------------------------------------------------------------ data

LogisticDataset generate_logistic_data(std::size_t N, std::uint64_t seed) {
  require(N >= 1, "generate_logistic_data: N must be positive");
  const Eigen::Vector4d mu0(0, 0, 1, 1), mu1(1, 1, 0, 0);
  Rng rng = make_rng(seed);
  LogisticDataset ds;
  ds.seed = seed;
  ds.ys.resize(static_cast<Eigen::Index>(N), 4);
  ds.labels.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const int z = uniform01(rng) < 0.5 ? 1 : 0;
    Eigen::Vector4d zeta = z ? mu1 : mu0;
    for (int j = 0; j < 4; ++j) zeta[j] += rng.normal();
    ds.ys.row(static_cast<Eigen::Index>(i)) = ((2.0 * z - 1.0) * zeta).transpose();
    ds.labels[i] = z;
  }
  return ds;
}

// ------------------------------------------------------------ fig1a

ResultTable run_fig1a(const Fig1aConfig& cfg) {
  require(!cfg.deltas.empty() && !cfg.eps.empty(), "fig1a: delta and eps grids must be nonempty");
  require(cfg.samples >= 2 && cfg.repeats >= 1, "fig1a: need at least 2 samples and 1 repeat");
  for (double e : cfg.eps) require(e >= 0 && std::isfinite(e), "fig1a: eps values must be nonnegative");

  struct Cell {
    double delta, eps;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < cfg.deltas.size(); ++a)
    for (std::size_t b = 0; b < cfg.eps.size(); ++b)
      cells.push_back({cfg.deltas[a], cfg.eps[b], derive_seed(cfg.seed, "fig1a", a * cfg.eps.size() + b)});

  // One job per (cell, repeat).
  const std::size_t jobs = cells.size() * cfg.repeats;
  auto dists = parallel_map(jobs, resolve_threads(cfg.threads), [&](std::size_t job) {
    const Cell& c = cells[job / cfg.repeats];
    const std::size_t r = job % cfg.repeats;
    auto model = std::make_shared<GaussianMixture2>(Vector::Constant(1, c.delta));
    const auto k = model->concavity();
    const double horizon = cfg.horizon ? *cfg.horizon : 10.0 / k.value_or(1.0);
    const auto n = static_cast<Eigen::Index>(cfg.samples);
    SampleSet exact = sample_exact(*model, n, derive_seed(c.seed, "exact", r));
    DriftField drift = offset_drift(exact_drift(model), Vector::Constant(1, c.eps));
    SampleSet approx{Matrix(n, 1), "em-terminal", derive_seed(c.seed, "em", r)};
    const Vector x0 = Vector::Constant(1, cfg.x0);
    for (Eigen::Index j = 0; j < n; ++j)
      approx.points(j, 0) =
          euler_maruyama_terminal(drift, cfg.dt, horizon, x0, derive_seed(approx.seed, static_cast<std::uint64_t>(j)))[0];
    return wasserstein_1d(exact, approx);
  });

  ResultTable table;
  table.columns = {"delta", "eps", "emp_w", "emp_w_sd", "bound", "seed", "reps"};
  nlohmann::json audit_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    std::vector<double> ws(dists.begin() + static_cast<long>(i * cfg.repeats),
                           dists.begin() + static_cast<long>((i + 1) * cfg.repeats));
    const Spread s = spread(ws);
    GaussianMixture2 model(Vector::Constant(1, c.delta));
    std::optional<double> bound;
    nlohmann::json rec;
    if (auto k = model.concavity()) {
      bound = bound_exponential(cert_from_strong_concavity(*k), c.eps);
      rec = bound_json("C*eps/log(1/rho)", {{"C", 1.0}, {"rho", std::exp(-*k)}, {"eps", c.eps}, {"k", *k}}, bound,
                       "strong-concavity");
    } else {
      rec = bound_json("C*eps/log(1/rho)", {{"eps", c.eps}}, std::nullopt, "uncertified");
    }
    table.add_row({format_number(c.delta), format_number(c.eps), format_number(s.mean), format_number(s.sd),
                   bound ? format_number(*bound) : "none", u64_str(c.seed), std::to_string(cfg.repeats)});
    const double horizon = cfg.horizon ? *cfg.horizon : 10.0 / model.concavity().value_or(1.0);
    audit_rows.push_back({{"delta", c.delta},
                          {"eps", c.eps},
                          {"seed", c.seed},
                          {"bound", rec},
                          {"distance_method", "sorted-1d"},
                          {"schedule", {{"sampler", "euler_maruyama"}, {"dt", cfg.dt}, {"horizon", horizon}}}});
  }
  table.audit = {{"experiment", "fig1a"},
                 {"seed", cfg.seed},
                 {"samples", cfg.samples},
                 {"repeats", cfg.repeats},
                 {"x0", cfg.x0},
                 {"cells", audit_rows}};
  return table;
}

// ------------------------------------------------------------ fig1b

namespace {

struct Fig1bSetup {
  std::size_t N;
  std::uint64_t seed;
  std::shared_ptr<GLMPosterior> model;
  Vector mode;
  Matrix hessian;
  GlmConstants constants;
  double k_sched = 0, L_sched = 0;
  SampleSet reference;
  double mh_acceptance = 0;
};

}  // namespace

ResultTable run_fig1b(const Fig1bConfig& cfg) {
  require(!cfg.Ns.empty(), "fig1b: N grid must be nonempty");
  require(cfg.chains >= 2 && cfg.repeats >= 1, "fig1b: need at least 2 chains and 1 repeat");
  require(cfg.radius > 0, "fig1b: radius must be positive");
  if (cfg.schedule_constants != "local" && cfg.schedule_constants != "global")
    throw ConfigError("fig1b: schedule_constants must be 'local' or 'global'");
  constexpr std::size_t d = 4;
  const unsigned threads = resolve_threads(cfg.threads);

  // Per N: data, posterior, mode, reference samples.
  auto setups = parallel_map(cfg.Ns.size(), threads, [&](std::size_t i) {
    Fig1bSetup s;
    s.N = cfg.Ns[i];
    s.seed = derive_seed(cfg.seed, "fig1b", i);
    LogisticDataset data = generate_logistic_data(s.N, derive_seed(s.seed, "data"));
    s.model = std::make_shared<GLMPosterior>(GaussianTarget::standard(d), logistic_link(), data.ys);
    s.mode = find_mode(*s.model);
    s.hessian = *s.model->hessian(s.mode);
    s.constants = glm_constants(*s.model, cfg.radius);
    if (cfg.schedule_constants == "local") {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(-s.hessian, Eigen::EigenvaluesOnly);
      s.k_sched = eig.eigenvalues().minCoeff();
      s.L_sched = eig.eigenvalues().maxCoeff();
    } else {
      s.k_sched = s.constants.k_N;
      s.L_sched = s.constants.L_N;
    }
    MhOptions mh;
    mh.x0 = s.mode;
    mh.initial_cov = (-s.hessian).inverse();
    mh.domain_radius = cfg.radius;
    MhResult ref = adaptive_mh(*s.model, cfg.mh_iters, derive_seed(s.seed, "mh"), mh);
    require(ref.samples.size() >= static_cast<Eigen::Index>(cfg.reference_points),
            "fig1b: fewer post-burn-in MH samples than reference points");
    s.reference = std::move(ref.samples);
    s.mh_acceptance = ref.acceptance_rate;
    return s;
  });

  struct MethodPlan {
    std::size_t setup;
    std::string method;
    std::size_t steps;
    UlaSchedule schedule;
    long long residual;
  };
  std::vector<MethodPlan> plans;
  for (std::size_t i = 0; i < setups.size(); ++i) {
    const auto& s = setups[i];
    BudgetModel budget = matched_budget(s.N, cfg.T, d);
    plans.push_back({i, "ULA", cfg.T, ula_step_schedule(s.k_sched, s.L_sched, cfg.T, cfg.alpha), budget.residual});
    plans.push_back(
        {i, "AGULA", budget.T_tilde, ula_step_schedule(s.k_sched, s.L_sched, budget.T_tilde, cfg.alpha), budget.residual});
  }

  const std::size_t jobs = plans.size() * cfg.repeats;
  auto dists = parallel_map(jobs, threads, [&](std::size_t job) {
    const MethodPlan& p = plans[job / cfg.repeats];
    const std::size_t r = job % cfg.repeats;
    const Fig1bSetup& s = setups[p.setup];
    const std::uint64_t base = derive_seed(s.seed, p.method, r);
    DriftField drift = p.method == "ULA" ? exact_drift(s.model) : taylor2_drift(s.model, s.mode);
    UlaOptions opts;
    opts.projection_radius = cfg.radius;
    opts.record_stride = 0;
    const auto n = static_cast<Eigen::Index>(cfg.chains);
    SampleSet terminal{Matrix(n, d), p.method, base};
    for (Eigen::Index j = 0; j < n; ++j)
      terminal.points.row(j) =
          ula_terminal(drift, p.schedule.schedule, s.mode, p.steps, derive_seed(base, static_cast<std::uint64_t>(j)), opts)
              .transpose();
    Rng pick = make_rng(derive_seed(s.seed, "subset", r));
    auto idx = choose_without_replacement(s.reference.size(), static_cast<Eigen::Index>(cfg.reference_points), pick);
    SampleSet ref = s.reference.rows(idx, "mh-reference");
    // Equal sizes are required; the smaller set sets the size.
    const Eigen::Index m = std::min<Eigen::Index>(n, ref.size());
    std::vector<Eigen::Index> head(static_cast<std::size_t>(m));
    std::iota(head.begin(), head.end(), Eigen::Index{0});
    return wasserstein(terminal.rows(head, terminal.label), ref.rows(head, ref.label), base).value;
  });

  ResultTable table;
  table.columns = {"N",     "method", "steps", "gamma1", "step_condition", "mean_w", "sd_w", "budget_residual",
                   "seed", "reps"};
  nlohmann::json audit_ns = nlohmann::json::array();
  for (std::size_t pi = 0; pi < plans.size(); ++pi) {
    const MethodPlan& p = plans[pi];
    const Fig1bSetup& s = setups[p.setup];
    std::vector<double> ws(dists.begin() + static_cast<long>(pi * cfg.repeats),
                           dists.begin() + static_cast<long>((pi + 1) * cfg.repeats));
    const Spread sp = spread(ws);
    table.add_row({std::to_string(s.N), p.method, std::to_string(p.steps), format_number(p.schedule.schedule.gamma1),
                   *p.schedule.condition_holds ? "ok" : "violated", format_number(sp.mean), format_number(sp.sd),
                   std::to_string(p.residual), u64_str(derive_seed(s.seed, p.method, 0)),
                   std::to_string(cfg.repeats)});
  }
  for (const auto& s : setups) {
    std::optional<double> fsb;
    try {
      fsb = ula_finite_sample_bound(s.constants.k_N, s.constants.L_N, d, cfg.T, cfg.alpha);
    } catch (const InvalidArgument&) {
    }
    audit_ns.push_back(
        {{"N", s.N},
         {"seed", s.seed},
         {"mode", std::vector<double>(s.mode.data(), s.mode.data() + s.mode.size())},
         {"glm_constants",
          {{"k_N", s.constants.k_N},
           {"L_N", s.constants.L_N},
           {"M_N", s.constants.M_N},
           {"k_N_spectral", s.constants.k_N_spectral},
           {"a_norm", s.constants.a_norm},
           {"a_min", s.constants.a_min},
           {"s2", s.constants.s2},
           {"s3", s.constants.s3},
           {"k_link", s.constants.k_link}}},
         {"schedule_constants", {{"source", cfg.schedule_constants}, {"k", s.k_sched}, {"L", s.L_sched}}},
         {"exact_chain_bound_sq",
          bound_json("16(1-alpha)L^2 kappa^-3 d T^-1 log(kappa T/(2(1-alpha)))",
                     {{"k", s.constants.k_N}, {"L", s.constants.L_N}, {"d", 4.0}, {"T", double(cfg.T)},
                      {"alpha", cfg.alpha}},
                     fsb, "glm-constants")},
         {"mh", {{"iters", cfg.mh_iters}, {"acceptance", s.mh_acceptance}, {"radius", cfg.radius}}}});
  }
  table.audit = {{"experiment", "fig1b"},
                 {"seed", cfg.seed},
                 {"T", cfg.T},
                 {"alpha", cfg.alpha},
                 {"chains", cfg.chains},
                 {"repeats", cfg.repeats},
                 {"reference_points", cfg.reference_points},
                 {"distance_method", "assignment"},
                 {"initialization", "posterior mode"},
                 {"datasets", audit_ns}};
  return table;
}

// ------------------------------------------------------------ zig-zag

ResultTable run_zzp_check(const ZzpCheckConfig& cfg) {
  require(!cfg.eps.empty(), "zzp_check: eps grid must be nonempty");
  require(cfg.samples >= 2 && cfg.repeats >= 1, "zzp_check: need at least 2 samples and 1 repeat");
  require(cfg.spacing > 0 && cfg.burn_in >= 0, "zzp_check: spacing must be positive and burn-in nonnegative");
  const bool have_cert = cfg.cert_C && cfg.cert_alpha && cfg.cert_beta;
  const double horizon = cfg.burn_in + cfg.spacing * static_cast<double>(cfg.samples - 1) + 1e-9;
  const std::size_t jobs = cfg.eps.size() * cfg.repeats;
  auto dists = parallel_map(jobs, resolve_threads(cfg.threads), [&](std::size_t job) {
    const std::size_t e = job / cfg.repeats, r = job % cfg.repeats;
    const std::uint64_t cell = derive_seed(cfg.seed, "zzp", e);
    GaussianTarget exact(Vector::Zero(1), 1.0);
    GaussianTarget shifted(Vector::Constant(1, cfg.eps[e]), 1.0);
    const ZZPState s0{Vector::Zero(1), Vector::Ones(1)};
    auto path = [&](const TargetModel& m, std::string_view tag) {
      ChainTrace t = zzp_simulate(m, nullptr, s0, horizon, derive_seed(cell, tag, r));
      SampleSet s = zzp_sample_path(t, cfg.burn_in, cfg.spacing, std::string(tag));
      std::vector<Eigen::Index> head(cfg.samples);
      std::iota(head.begin(), head.end(), Eigen::Index{0});
      return s.rows(head, std::string(tag));
    };
    return wasserstein_1d(path(exact, "exact"), path(shifted, "approx"));
  });
  ResultTable table;
  table.columns = {"eps", "emp_w", "emp_w_sd", "exact_w", "bound", "seed", "reps"};
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t e = 0; e < cfg.eps.size(); ++e) {
    std::vector<double> ws(dists.begin() + static_cast<long>(e * cfg.repeats),
                           dists.begin() + static_cast<long>((e + 1) * cfg.repeats));
    const Spread sp = spread(ws);
    std::optional<double> bound;
    // ‖∇log π − ∇log π̃‖₁ = |ε| in 1-D.
    if (have_cert) bound = bound_zzp(PolynomialCert{*cfg.cert_C, *cfg.cert_alpha, *cfg.cert_beta, "asserted"}, cfg.eps[e]);
    const std::uint64_t cell = derive_seed(cfg.seed, "zzp", e);
    table.add_row({format_number(cfg.eps[e]), format_number(sp.mean), format_number(sp.sd), format_number(cfg.eps[e]),
                   bound ? format_number(*bound) : "none", u64_str(cell), std::to_string(cfg.repeats)});
    cells.push_back({{"eps", cfg.eps[e]},
                     {"seed", cell},
                     {"bound", bound_json("C*eps/((alpha-1)*beta^(alpha-1))", {{"eps_l1", cfg.eps[e]}}, bound,
                                          have_cert ? "asserted" : "uncertified")}});
  }
  table.audit = {{"experiment", "zzp_check"},
                 {"seed", cfg.seed},
                 {"horizon", horizon},
                 {"burn_in", cfg.burn_in},
                 {"spacing", cfg.spacing},
                 {"samples", cfg.samples},
                 {"repeats", cfg.repeats},
                 {"thinning_lipschitz", 1.0},
                 {"cells", cells}};
  return table;
}

// ------------------------------------------------------------ OU drift

ResultTable run_stochastic_drift_check(const StochasticDriftConfig& cfg) {
  require(cfg.dim >= 1 && cfg.samples >= 2 && cfg.repeats >= 1, "stochastic_drift_check: bad sizes");
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  auto model = GaussianTarget::standard(cfg.dim);
  StochasticDriftSpec spec = ou_stochastic_drift(exact_drift(model), cfg.alpha, cfg.v);
  const auto n = static_cast<Eigen::Index>(cfg.samples);
  const double aux_sd = std::sqrt(cfg.v / cfg.alpha);

  struct Rep {
    double w, self, x_var;
  };
  auto reps = parallel_map(cfg.repeats, resolve_threads(cfg.threads), [&](std::size_t r) {
    const std::uint64_t base = derive_seed(cfg.seed, "ou", r);
    SampleSet a = sample_exact(*model, n, derive_seed(base, "exact-a"));
    SampleSet b = sample_exact(*model, n, derive_seed(base, "exact-b"));
    SampleSet joint{Matrix(n, d), "joint-terminal", derive_seed(base, "joint")};
    Rng y_init = make_rng(derive_seed(base, "y0"));
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector y0 = aux_sd * standard_normal(y_init, d);
      ChainTrace t = joint_stochastic_diffusion(spec, cfg.dt, cfg.horizon, Vector::Zero(d), y0,
                                                derive_seed(joint.seed, static_cast<std::uint64_t>(j)), 0);
      joint.points.row(j) = t.final_state().transpose();
    }
    const double mean = joint.points.col(0).mean();
    const double var = (joint.points.col(0).array() - mean).square().sum() / static_cast<double>(n - 1);
    return Rep{wasserstein(a, joint, base).value, wasserstein(a, b, base).value, var};
  });
  std::vector<double> ws, selfs, vars;
  for (const auto& r : reps) {
    ws.push_back(r.w);
    selfs.push_back(r.self);
    vars.push_back(r.x_var);
  }
  const Spread w = spread(ws), self = spread(selfs), xv = spread(vars);
  // Stationary Var X of dX = (−X + Y)dt + √2 dW, dY = −αY dt + √(2v) dW'.
  const double stationary_var = 1.0 + cfg.v / (cfg.alpha * (1.0 + cfg.alpha));
  ResultTable table;
  table.columns = {"alpha", "v",     "emp_w",      "emp_w_sd", "self_w",
                   "self_w_sd", "ratio", "x_variance", "stationary_x_variance", "seed",
                   "reps"};
  table.add_row({format_number(cfg.alpha), format_number(cfg.v), format_number(w.mean), format_number(w.sd),
                 format_number(self.mean), format_number(self.sd), format_number(w.mean / self.mean),
                 format_number(xv.mean), format_number(stationary_var), u64_str(cfg.seed),
                 std::to_string(cfg.repeats)});
  table.audit = {
      {"experiment", "stochastic_drift_check"},
      {"seed", cfg.seed},
      {"dim", cfg.dim},
      {"schedule", {{"sampler", "joint_euler_maruyama"}, {"dt", cfg.dt}, {"horizon", cfg.horizon}}},
      {"bound", bound_json("C*E[eps]/log(1/rho)", {{"C", 1.0}, {"rho", std::exp(-1.0)}, {"expected_eps", 0.0}},
                           bound_stochastic(cert_from_strong_concavity(1.0), 0.0), "strong-concavity")},
      {"marginal_x_w1_gaussian",
       std::sqrt(2.0 / std::numbers::pi) * std::abs(std::sqrt(stationary_var) - 1.0)}};
  return table;
}

// ------------------------------------------------------------ config

namespace {

void check_keys(const KeyValueConfig::Section& s, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [k, v] : s)
    if (!allowed.count(k)) throw ConfigError(what + ": unknown key '" + k + "'");
}

std::size_t get_count(const KeyValueConfig::Section& s, const std::string& key, std::size_t fallback) {
  const auto v = get_int(s, key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError("'" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::uint64_t get_seed(const KeyValueConfig::Section& s, std::uint64_t fallback) {
  auto it = s.find("seed");
  return it == s.end() ? fallback : parse_u64(it->second, "seed");
}

std::optional<double> get_optional(const KeyValueConfig::Section& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end()) return std::nullopt;
  return parse_double(it->second, key);
}

unsigned get_threads(const KeyValueConfig::Section& s) {
  return static_cast<unsigned>(get_count(s, "threads", 0));
}

}  // namespace

Fig1aConfig fig1a_config(const KeyValueConfig::Section& s) {
  check_keys(s, {"deltas", "eps", "samples", "reps", "dt", "horizon", "x0", "seed", "threads"}, "fig1a");
  Fig1aConfig c;
  c.deltas = get_double_list(s, "deltas", c.deltas);
  c.eps = get_double_list(s, "eps", c.eps);
  c.samples = get_count(s, "samples", c.samples);
  c.repeats = get_count(s, "reps", c.repeats);
  c.dt = get_double(s, "dt", c.dt);
  c.horizon = get_optional(s, "horizon");
  c.x0 = get_double(s, "x0", c.x0);
  c.seed = get_seed(s, c.seed);
  c.threads = get_threads(s);
  if (c.deltas.empty() || c.eps.empty()) throw ConfigError("fig1a: grids must be nonempty");
  if (!(c.dt > 0)) throw ConfigError("fig1a: dt must be positive");
  return c;
}

Fig1bConfig fig1b_config(const KeyValueConfig::Section& s) {
  check_keys(s,
             {"N", "T", "alpha", "samples", "reps", "mh_iters", "reference_points", "radius", "schedule_constants",
              "seed", "threads"},
             "fig1b");
  Fig1bConfig c;
  if (s.count("N")) {
    c.Ns.clear();
    for (auto v : get_int_list(s, "N", {})) {
      if (v < 1) throw ConfigError("fig1b: N values must be positive");
      c.Ns.push_back(static_cast<std::size_t>(v));
    }
  }
  c.T = get_count(s, "T", c.T);
  c.alpha = get_double(s, "alpha", c.alpha);
  c.chains = get_count(s, "samples", c.chains);
  c.repeats = get_count(s, "reps", c.repeats);
  c.mh_iters = get_count(s, "mh_iters", c.mh_iters);
  c.reference_points = get_count(s, "reference_points", c.reference_points);
  c.radius = get_double(s, "radius", c.radius);
  if (auto it = s.find("schedule_constants"); it != s.end()) c.schedule_constants = it->second;
  c.seed = get_seed(s, c.seed);
  c.threads = get_threads(s);
  if (c.Ns.empty()) throw ConfigError("fig1b: N grid must be nonempty");
  if (c.T <= 4) throw ConfigError("fig1b: T must exceed d = 4");
  return c;
}

ZzpCheckConfig zzp_check_config(const KeyValueConfig::Section& s) {
  check_keys(s, {"eps", "samples", "spacing", "burn_in", "reps", "cert_C", "cert_alpha", "cert_beta", "seed", "threads"},
             "zzp_check");
  ZzpCheckConfig c;
  c.eps = get_double_list(s, "eps", c.eps);
  c.samples = get_count(s, "samples", c.samples);
  c.spacing = get_double(s, "spacing", c.spacing);
  c.burn_in = get_double(s, "burn_in", c.burn_in);
  c.repeats = get_count(s, "reps", c.repeats);
  c.cert_C = get_optional(s, "cert_C");
  c.cert_alpha = get_optional(s, "cert_alpha");
  c.cert_beta = get_optional(s, "cert_beta");
  c.seed = get_seed(s, c.seed);
  c.threads = get_threads(s);
  if (c.eps.empty()) throw ConfigError("zzp_check: eps grid must be nonempty");
  const int given = int(c.cert_C.has_value()) + int(c.cert_alpha.has_value()) + int(c.cert_beta.has_value());
  if (given != 0 && given != 3)
    throw ConfigError("zzp_check: cert_C, cert_alpha and cert_beta must be given together");
  return c;
}

StochasticDriftConfig stochastic_drift_config(const KeyValueConfig::Section& s) {
  check_keys(s, {"dim", "alpha", "v", "dt", "horizon", "samples", "reps", "seed", "threads"}, "stochastic_drift_check");
  StochasticDriftConfig c;
  c.dim = get_count(s, "dim", c.dim);
  c.alpha = get_double(s, "alpha", c.alpha);
  c.v = get_double(s, "v", c.v);
  c.dt = get_double(s, "dt", c.dt);
  c.horizon = get_double(s, "horizon", c.horizon);
  c.samples = get_count(s, "samples", c.samples);
  c.repeats = get_count(s, "reps", c.repeats);
  c.seed = get_seed(s, c.seed);
  c.threads = get_threads(s);
  if (!(c.alpha > 0) || !(c.v > 0)) throw ConfigError("stochastic_drift_check: alpha and v must be positive");
  return c;
}

ResultTable run_experiment(const std::string& name, const KeyValueConfig& config,
                           const KeyValueConfig::Section& overrides) {
  KeyValueConfig::Section merged;
  if (config.has_section(name)) merged = config.section(name);
  for (const auto& [k, v] : overrides) merged[k] = v;
  if (name == "fig1a") return run_fig1a(fig1a_config(merged));
  if (name == "fig1b") return run_fig1b(fig1b_config(merged));
  if (name == "zzp_check") return run_zzp_check(zzp_check_config(merged));
  if (name == "stochastic_drift_check") return run_stochastic_drift_check(stochastic_drift_config(merged));
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace driftbound
