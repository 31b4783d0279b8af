#include "driftbound/samplers.hpp"

#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace driftbound {

namespace {

std::uint64_t x_stream(std::uint64_t seed) { return derive_seed(seed, 0); }
std::uint64_t y_stream(std::uint64_t seed) { return derive_seed(seed, 1); }

void check_state(const Vector& x, std::size_t step, const char* who) {
  if (!x.allFinite() || x.norm() > kDivergenceNorm) {
    std::ostringstream msg;
    msg << who << ": divergence at step " << step << " (state norm " << x.norm() << ")";
    throw NumericalError(msg.str());
  }
}

bool keep(std::size_t step, std::size_t total, std::size_t stride) {
  if (step == 0 || step == total) return true;
  return stride != 0 && step % stride == 0;
}

}  // namespace

// ---------------------------------------------------------------- schedule

StepSchedule StepSchedule::constant(double gamma) {
  StepSchedule s{gamma, 0.0};
  s.validate();
  return s;
}

StepSchedule StepSchedule::power(double gamma1, double alpha) {
  StepSchedule s{gamma1, alpha};
  s.validate();
  return s;
}

double StepSchedule::step(std::size_t i) const {
  if (i == 0) throw InvalidArgument("StepSchedule: steps are indexed from 1");
  return alpha == 0.0 ? gamma1 : gamma1 * std::pow(static_cast<double>(i), -alpha);
}

void StepSchedule::validate() const {
  require(std::isfinite(gamma1) && gamma1 > 0, "StepSchedule: gamma1 must be positive");
  require(alpha >= 0.0 && alpha < 1.0, "StepSchedule: alpha must lie in [0, 1)");
}

// ------------------------------------------------------------------ traces

void ChainTrace::validate() const {
  if (states.empty()) throw InvalidArgument("ChainTrace: empty");
  if (times.size() != states.size()) throw InvalidArgument("ChainTrace: times/states length mismatch");
  if (!aux.empty() && aux.size() != states.size()) throw InvalidArgument("ChainTrace: aux length mismatch");
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!states[i].allFinite()) throw InvalidArgument("ChainTrace: non-finite state at index " + std::to_string(i));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidArgument("ChainTrace: times not strictly increasing at index " + std::to_string(i));
  }
}

SampleSet ChainTrace::as_sample_set(std::string label) const {
  if (states.empty()) throw InvalidArgument("ChainTrace: empty");
  SampleSet s{Matrix(static_cast<Eigen::Index>(states.size()), states.front().size()),
              label.empty() ? meta.value("sampler", std::string("trace")) : std::move(label), seed};
  for (std::size_t i = 0; i < states.size(); ++i) s.points.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  return s;
}

void write_csv(const ChainTrace& trace, const std::filesystem::path& path) {
  trace.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const auto d = trace.states.front().size();
  const auto da = trace.aux.empty() ? 0 : trace.aux.front().size();
  out << "time";
  for (Eigen::Index j = 0; j < d; ++j) out << ",x" << j;
  for (Eigen::Index j = 0; j < da; ++j) out << ",v" << j;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.times[i];
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << trace.states[i][j];
    for (Eigen::Index j = 0; j < da; ++j) out << ',' << trace.aux[i][j];
    out << '\n';
  }
}

// Binary layout (little-endian):
//   "DBTRACE1" | u64 seed | u64 n | u64 d | u64 aux_d | f64 times[n] |
//   f64 states[n*d] | f64 aux[n*aux_d] | u64 meta_len | meta JSON bytes
namespace {
constexpr char kMagic[8] = {'D', 'B', 'T', 'R', 'A', 'C', 'E', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("truncated trace file");
  return v;
}
}  // namespace

void write_binary(const ChainTrace& trace, const std::filesystem::path& path) {
  trace.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::uint64_t n = trace.size();
  const std::uint64_t d = static_cast<std::uint64_t>(trace.states.front().size());
  const std::uint64_t da = trace.aux.empty() ? 0 : static_cast<std::uint64_t>(trace.aux.front().size());
  out.write(kMagic, sizeof(kMagic));
  put(out, trace.seed);
  put(out, n);
  put(out, d);
  put(out, da);
  for (double t : trace.times) put(out, t);
  for (const auto& s : trace.states) out.write(reinterpret_cast<const char*>(s.data()), sizeof(double) * d);
  for (const auto& a : trace.aux) out.write(reinterpret_cast<const char*>(a.data()), sizeof(double) * da);
  std::string meta = trace.meta.dump();
  put(out, static_cast<std::uint64_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
}

ChainTrace read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace file " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ConfigError("not a trace file: " + path.string());
  ChainTrace t;
  t.seed = get<std::uint64_t>(in);
  auto n = get<std::uint64_t>(in);
  auto d = get<std::uint64_t>(in);
  auto da = get<std::uint64_t>(in);
  t.times.resize(n);
  for (auto& v : t.times) v = get<double>(in);
  t.states.assign(n, Vector(static_cast<Eigen::Index>(d)));
  for (auto& s : t.states) in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(sizeof(double) * d));
  if (da > 0) {
    t.aux.assign(n, Vector(static_cast<Eigen::Index>(da)));
    for (auto& a : t.aux) in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(sizeof(double) * da));
  }
  auto len = get<std::uint64_t>(in);
  std::string meta(len, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(len));
  if (!in) throw ConfigError("truncated trace file " + path.string());
  t.meta = nlohmann::json::parse(meta);
  return t;
}

// --------------------------------------------------------------------- ULA

Vector project_ball(const Vector& x, double radius) {
  require(std::isfinite(radius) && radius > 0, "project_ball: radius must be positive");
  double n = x.norm();
  // The slack absorbs the rounding of a previous projection, so projecting
  // twice returns the same vector.
  if (n <= radius * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return x;
  return (radius / n) * x;
}

namespace {

template <class OnState>
void run_ula(const DriftField& drift, const StepSchedule& schedule, const Vector& x0, std::size_t steps,
             std::uint64_t seed, const UlaOptions& opts, OnState&& on_state) {
  require(steps >= 1, "ula_chain: steps must be at least 1");
  require_dim(drift.dim, x0.size(), "ula_chain x0");
  require_finite(x0, "ula_chain x0");
  schedule.validate();
  if (opts.projection_radius) require(*opts.projection_radius > 0, "ula_chain: projection radius must be positive");

  Rng rng = make_rng(x_stream(seed));
  Vector x = x0;
  if (opts.projection_radius) x = project_ball(x, *opts.projection_radius);
  Vector b(x.size()), xi(x.size());
  on_state(std::size_t{0}, x);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double g = schedule.step(i);
    drift.eval_into(x, b);
    fill_standard_normal(rng, xi);
    x += g * b + std::sqrt(2.0 * g) * xi;
    if (opts.projection_radius) {
      double n = x.norm();
      if (n > *opts.projection_radius) x *= *opts.projection_radius / n;
    }
    check_state(x, i, "ula_chain");
    on_state(i, x);
  }
}

nlohmann::json ula_meta(const DriftField& drift, const StepSchedule& schedule, std::size_t steps,
                        const UlaOptions& opts) {
  nlohmann::json m;
  m["sampler"] = "ula";
  m["drift"] = drift.label;
  m["gamma1"] = schedule.gamma1;
  m["alpha"] = schedule.alpha;
  m["steps"] = steps;
  if (opts.projection_radius) m["projection_radius"] = *opts.projection_radius;
  return m;
}

}  // namespace

ChainTrace ula_chain(const DriftField& drift, const StepSchedule& schedule, const Vector& x0, std::size_t steps,
                     std::uint64_t seed, const UlaOptions& opts) {
  ChainTrace t;
  t.seed = seed;
  run_ula(drift, schedule, x0, steps, seed, opts, [&](std::size_t i, const Vector& x) {
    if (keep(i, steps, opts.record_stride)) {
      t.times.push_back(static_cast<double>(i));
      t.states.push_back(x);
    }
  });
  t.meta = ula_meta(drift, schedule, steps, opts);
  return t;
}

Vector ula_terminal(const DriftField& drift, const StepSchedule& schedule, const Vector& x0, std::size_t steps,
                    std::uint64_t seed, const UlaOptions& opts) {
  Vector last;
  run_ula(drift, schedule, x0, steps, seed, opts, [&](std::size_t i, const Vector& x) {
    if (i == steps) last = x;
  });
  return last;
}

// ---------------------------------------------------------- Euler–Maruyama

namespace {

std::size_t step_count(double dt, double t_end) {
  require(std::isfinite(dt) && dt > 0, "euler_maruyama: dt must be positive");
  require(std::isfinite(t_end) && t_end > 0, "euler_maruyama: t_end must be positive");
  // Tolerate t_end/dt landing a hair below an integer.
  auto n = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
  if (n == 0) throw InvalidArgument("euler_maruyama: t_end < dt gives zero steps");
  return n;
}

}  // namespace

ChainTrace euler_maruyama(const DriftField& drift, double dt, double t_end, const Vector& x0, std::uint64_t seed,
                          std::size_t record_stride) {
  const std::size_t n = step_count(dt, t_end);
  require_dim(drift.dim, x0.size(), "euler_maruyama x0");
  require_finite(x0, "euler_maruyama x0");
  Rng rng = make_rng(x_stream(seed));
  const double sd = std::sqrt(2.0 * dt);
  Vector x = x0, b(x0.size()), xi(x0.size());
  ChainTrace t;
  t.seed = seed;
  t.times.push_back(0.0);
  t.states.push_back(x);
  for (std::size_t k = 1; k <= n; ++k) {
    drift.eval_into(x, b);
    fill_standard_normal(rng, xi);
    x += dt * b + sd * xi;
    check_state(x, k, "euler_maruyama");
    if (keep(k, n, record_stride)) {
      t.times.push_back(static_cast<double>(k) * dt);
      t.states.push_back(x);
    }
  }
  t.meta = {{"sampler", "euler_maruyama"}, {"drift", drift.label}, {"dt", dt}, {"steps", n}};
  return t;
}

Vector euler_maruyama_terminal(const DriftField& drift, double dt, double t_end, const Vector& x0,
                               std::uint64_t seed) {
  const std::size_t n = step_count(dt, t_end);
  require_dim(drift.dim, x0.size(), "euler_maruyama x0");
  require_finite(x0, "euler_maruyama x0");
  Rng rng = make_rng(x_stream(seed));
  const double sd = std::sqrt(2.0 * dt);
  Vector x = x0, b(x0.size());
  if (x0.size() == 1) {
    // Scalar fast path; draws the same variates in the same order.
    for (std::size_t k = 1; k <= n; ++k) {
      drift.eval_into(x, b);
      x[0] += dt * b[0] + sd * rng.normal();
      if (!std::isfinite(x[0]) || std::abs(x[0]) > kDivergenceNorm) check_state(x, k, "euler_maruyama");
    }
    return x;
  }
  Vector xi(x0.size());
  for (std::size_t k = 1; k <= n; ++k) {
    drift.eval_into(x, b);
    fill_standard_normal(rng, xi);
    x += dt * b + sd * xi;
    check_state(x, k, "euler_maruyama");
  }
  return x;
}

ChainTrace joint_stochastic_diffusion(const StochasticDriftSpec& spec, double dt, double t_end, const Vector& x0,
                                      const Vector& y0, std::uint64_t seed, std::size_t record_stride) {
  const std::size_t n = step_count(dt, t_end);
  require_dim(spec.base.dim, x0.size(), "joint_stochastic_diffusion x0");
  require_dim(spec.aux_dim, y0.size(), "joint_stochastic_diffusion y0");
  require(spec.aux_noise.rows() == y0.size() && spec.aux_noise.cols() == y0.size(),
          "joint_stochastic_diffusion: aux noise must be ℓ×ℓ");
  require_finite(x0, "joint_stochastic_diffusion x0");
  require_finite(y0, "joint_stochastic_diffusion y0");

  Rng rng_x = make_rng(x_stream(seed));
  Rng rng_y = make_rng(y_stream(seed));
  const double sd = std::sqrt(2.0 * dt);
  const double sq = std::sqrt(dt);
  Vector x = x0, y = y0, bx(x0.size()), by(y0.size()), xi(x0.size()), eta(y0.size());
  ChainTrace t;
  t.seed = seed;
  t.times.push_back(0.0);
  t.states.push_back(x);
  t.aux.push_back(y);
  for (std::size_t k = 1; k <= n; ++k) {
    spec.combine(x, y, bx);
    spec.aux_drift(y, by);
    fill_standard_normal(rng_x, xi);
    fill_standard_normal(rng_y, eta);
    x += dt * bx + sd * xi;
    y += dt * by + sq * (spec.aux_noise * eta);
    check_state(x, k, "joint_stochastic_diffusion");
    check_state(y, k, "joint_stochastic_diffusion (aux)");
    if (keep(k, n, record_stride)) {
      t.times.push_back(static_cast<double>(k) * dt);
      t.states.push_back(x);
      t.aux.push_back(y);
    }
  }
  t.meta = {{"sampler", "joint_stochastic_diffusion"}, {"drift", spec.label}, {"dt", dt}, {"steps", n}};
  return t;
}

}  // namespace driftbound
