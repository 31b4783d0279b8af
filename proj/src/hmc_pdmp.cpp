#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "driftbound/samplers.hpp"

namespace driftbound {

HmcState leapfrog_flow(const TargetModel& model, const Matrix& mass_inverse, HmcState s, double duration,
                       double dt) {
  require(dt > 0 && std::isfinite(dt), "leapfrog_flow: dt must be positive");
  require(duration >= 0 && std::isfinite(duration), "leapfrog_flow: duration must be nonnegative");
  require_dim(model.dim(), s.x.size(), "leapfrog_flow x");
  require_dim(model.dim(), s.p.size(), "leapfrog_flow p");
  Vector grad(s.x.size());
  double left = duration;
  model.grad_log_density_into(s.x, grad);
  while (left > 0) {
    const double h = std::min(dt, left);
    s.p += 0.5 * h * grad;
    s.x.noalias() += h * (mass_inverse * s.p);
    model.grad_log_density_into(s.x, grad);
    s.p += 0.5 * h * grad;
    left -= h;
    if (left < 1e-14 * duration) left = 0;
  }
  return s;
}

ChainTrace hmc_pdmp_simulate(const TargetModel& model, double lambda_refresh, const Matrix& mass, const HmcState& s0,
                             double t_end, std::uint64_t seed, std::optional<double> dt_flow) {
  require(lambda_refresh > 0 && std::isfinite(lambda_refresh), "hmc_pdmp_simulate: refresh rate must be positive");
  require(t_end > 0 && std::isfinite(t_end), "hmc_pdmp_simulate: t_end must be positive");
  const auto d = static_cast<Eigen::Index>(model.dim());
  require_dim(model.dim(), s0.x.size(), "hmc_pdmp_simulate x");
  require_dim(model.dim(), s0.p.size(), "hmc_pdmp_simulate p");
  require(mass.rows() == d && mass.cols() == d, "hmc_pdmp_simulate: mass matrix has the wrong shape");
  require(mass.isApprox(mass.transpose()), "hmc_pdmp_simulate: mass matrix must be symmetric");
  Eigen::LLT<Matrix> llt(mass);
  if (llt.info() != Eigen::Success) throw InvalidArgument("hmc_pdmp_simulate: mass matrix is not positive definite");
  const Matrix chol = llt.matrixL();
  const Matrix minv = llt.solve(Matrix::Identity(d, d));
  const double h = dt_flow ? *dt_flow : std::min(0.01, 0.1 / lambda_refresh);
  require(h > 0 && std::isfinite(h), "hmc_pdmp_simulate: dt_flow must be positive");

  Rng rng = make_rng(seed);
  ChainTrace trace;
  trace.seed = seed;
  HmcState s = s0;
  double t = 0.0;
  trace.times.push_back(t);
  trace.states.push_back(s.x);
  trace.aux.push_back(s.p);
  Vector z(d);
  std::size_t epochs = 0;
  for (;;) {
    const double wait = exponential1(rng) / lambda_refresh;
    const double flight = std::min(wait, t_end - t);
    s = leapfrog_flow(model, minv, std::move(s), flight, h);
    if (!s.x.allFinite() || s.x.norm() > kDivergenceNorm)
      throw NumericalError("hmc_pdmp_simulate: divergence after epoch " + std::to_string(epochs));
    t += flight;
    if (t >= t_end) break;
    // Momentum refresh from N(0, M): the invariant law is π × N(0, M).
    fill_standard_normal(rng, z);
    s.p.noalias() = chol * z;
    ++epochs;
    if (t > trace.times.back()) {
      trace.times.push_back(t);
      trace.states.push_back(s.x);
      trace.aux.push_back(s.p);
    } else {
      trace.aux.back() = s.p;
    }
  }
  if (t > trace.times.back()) {
    trace.times.push_back(t);
    trace.states.push_back(s.x);
    trace.aux.push_back(s.p);
  }
  trace.meta = {{"sampler", "hmc_pdmp"},
                {"lambda_refresh", lambda_refresh},
                {"dt_flow", h},
                {"t_end", t_end},
                {"epochs", epochs}};
  return trace;
}

}  // namespace driftbound
