#include <cmath>
#include <limits>
#include <sstream>

#include "driftbound/samplers.hpp"

namespace driftbound {

void ZZPState::validate() const {
  require(x.size() > 0, "ZZPState: empty position");
  require(theta.size() == x.size(), "ZZPState: theta and x lengths differ");
  require_finite(x, "ZZPState x");
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    require(theta[i] == 1.0 || theta[i] == -1.0, "ZZPState: theta components must be ±1");
}

RefreshFn constant_refresh(std::size_t d, double gamma) {
  require(std::isfinite(gamma) && gamma >= 0, "constant_refresh: gamma must be nonnegative");
  return [d, gamma](const Vector&, const Vector&) { return Vector::Constant(static_cast<Eigen::Index>(d), gamma); };
}

namespace {

Vector refresh_rates(const RefreshFn& refresh, const Vector& x, const Vector& theta) {
  if (!refresh) return Vector::Zero(x.size());
  Vector g = refresh(x, theta);
  require_dim(static_cast<std::size_t>(x.size()), g.size(), "zzp refresh");
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (!(g[i] >= 0) || !std::isfinite(g[i])) throw InvalidArgument("zzp_rate: refresh rate must be nonnegative");
  return g;
}

void switching_rates(const TargetModel& model, const RefreshFn& refresh, const Vector& x, const Vector& theta,
                     Vector& grad, Vector& out) {
  model.grad_log_density_into(x, grad);
  out = refresh_rates(refresh, x, theta);
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] += std::max(0.0, -theta[i] * grad[i]);
}

}  // namespace

Vector zzp_rate(const TargetModel& model, const RefreshFn& refresh, const ZZPState& s) {
  s.validate();
  require_dim(model.dim(), s.x.size(), "zzp_rate");
  Vector grad(s.x.size()), out(s.x.size());
  switching_rates(model, refresh, s.x, s.theta, grad, out);
  return out;
}

ChainTrace zzp_simulate(const TargetModel& model, const RefreshFn& refresh, const ZZPState& s0, double t_end,
                        std::uint64_t seed, const ZzpOptions& opts) {
  s0.validate();
  require_dim(model.dim(), s0.x.size(), "zzp_simulate");
  require(std::isfinite(t_end) && t_end > 0, "zzp_simulate: t_end must be positive");
  std::optional<double> lip = opts.lipschitz ? opts.lipschitz : model.lipschitz();
  if (!lip || !(*lip > 0)) throw InvalidArgument("zzp_simulate: a positive gradient Lipschitz constant is required");

  const Eigen::Index d = s0.x.size();
  // Slope of every coordinate's envelope: |∂_i log π(x + θs) − ∂_i log π(x)| ≤ L‖θ‖s = L√d s.
  const double slope = *lip * std::sqrt(static_cast<double>(d));

  Rng rng = make_rng(seed);
  Vector x = s0.x, theta = s0.theta, grad(d), rate(d);
  double t = 0.0;

  ChainTrace trace;
  trace.seed = seed;
  trace.times.push_back(0.0);
  trace.states.push_back(x);
  trace.aux.push_back(theta);

  std::size_t proposals = 0, accepted = 0;
  for (;;) {
    switching_rates(model, refresh, x, theta, grad, rate);

    // First arrival of each coordinate's envelope process: solve
    // a·τ + slope·τ²/2 = E with E ~ Exp(1); written in a cancellation-free form.
    Eigen::Index which = -1;
    double tau = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d; ++i) {
      double e = exponential1(rng);
      double a = rate[i];
      double ti = 2.0 * e / (a + std::sqrt(a * a + 2.0 * slope * e));
      if (ti < tau) {
        tau = ti;
        which = i;
      }
    }

    if (t + tau >= t_end) {
      x += (t_end - t) * theta;
      t = t_end;
      break;
    }
    x += tau * theta;
    t += tau;
    ++proposals;

    const double envelope = rate[which] + slope * tau;
    model.grad_log_density_into(x, grad);
    double true_rate = std::max(0.0, -theta[which] * grad[which]) + refresh_rates(refresh, x, theta)[which];
    if (true_rate > envelope * (1.0 + 1e-12) + 1e-12) {
      std::ostringstream msg;
      msg << "zzp_simulate: switching rate " << true_rate << " exceeds thinning envelope " << envelope
          << " at t=" << t << "; the Lipschitz constant " << *lip << " is too small";
      throw NumericalError(msg.str());
    }
    const double ratio = envelope > 0 ? std::min(1.0, true_rate / envelope) : 0.0;
    if (uniform01(rng) < ratio) {
      theta[which] = -theta[which];
      ++accepted;
      trace.times.push_back(t);
      trace.states.push_back(x);
      trace.aux.push_back(theta);
    }
    if (!x.allFinite() || x.norm() > kDivergenceNorm) throw NumericalError("zzp_simulate: divergence");
  }
  if (t > trace.times.back()) {
    trace.times.push_back(t);
    trace.states.push_back(x);
    trace.aux.push_back(theta);
  }
  trace.meta = {{"sampler", "zigzag"},
                {"t_end", t_end},
                {"lipschitz", *lip},
                {"proposals", proposals},
                {"accepted", accepted}};
  return trace;
}

ZzpTimeAverages zzp_time_averages(const ChainTrace& trace) {
  trace.validate();
  if (trace.aux.size() != trace.size()) throw InvalidArgument("zzp_time_averages: trace lacks velocities");
  const Eigen::Index d = trace.states.front().size();
  ZzpTimeAverages out;
  Vector m1 = Vector::Zero(d), m2 = Vector::Zero(d), plus = Vector::Zero(d);
  double horizon = 0.0;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const double h = trace.times[k + 1] - trace.times[k];
    const Vector& a = trace.states[k];
    const Vector& v = trace.aux[k];
    // x(s) = a + v s on [0, h]: ∫x = a h + v h²/2, ∫x² = a² h + a v h² + v² h³/3.
    m1 += a * h + v * (h * h / 2.0);
    m2 += a.cwiseProduct(a) * h + a.cwiseProduct(v) * (h * h) + v.cwiseProduct(v) * (h * h * h / 3.0);
    for (Eigen::Index i = 0; i < d; ++i)
      if (v[i] > 0) plus[i] += h;
    horizon += h;
  }
  if (horizon <= 0) throw InvalidArgument("zzp_time_averages: zero-length trace");
  out.mean = m1 / horizon;
  out.variance = m2 / horizon - out.mean.cwiseProduct(out.mean);
  out.theta_plus_fraction = plus / horizon;
  out.horizon = horizon;
  return out;
}

SampleSet zzp_sample_path(const ChainTrace& trace, double t0, double spacing, std::string label) {
  trace.validate();
  if (trace.aux.size() != trace.size()) throw InvalidArgument("zzp_sample_path: trace lacks velocities");
  require(spacing > 0, "zzp_sample_path: spacing must be positive");
  const double t_last = trace.times.back();
  require(t0 >= trace.times.front() && t0 <= t_last, "zzp_sample_path: t0 outside the trace");
  const auto n = static_cast<Eigen::Index>(std::floor((t_last - t0) / spacing)) + 1;
  SampleSet s{Matrix(n, trace.states.front().size()), label.empty() ? "zigzag-path" : std::move(label), trace.seed};
  std::size_t seg = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double t = t0 + static_cast<double>(r) * spacing;
    while (seg + 1 < trace.size() && trace.times[seg + 1] <= t) ++seg;
    s.points.row(r) = (trace.states[seg] + (t - trace.times[seg]) * trace.aux[seg]).transpose();
  }
  return s;
}

}  // namespace driftbound
