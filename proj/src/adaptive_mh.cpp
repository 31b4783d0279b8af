#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "driftbound/samplers.hpp"

namespace driftbound {

namespace {

double log_target(const TargetModel& model, const Vector& x, const std::optional<double>& radius) {
  if (radius && x.norm() > *radius) return -std::numeric_limits<double>::infinity();
  return model.log_density(x);
}

// Lower Cholesky factor of a covariance, jittered until it factors.
Matrix stable_cholesky(Matrix cov) {
  const auto d = cov.rows();
  double jitter = 1e-10 * std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 30; ++attempt) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    cov += jitter * Matrix::Identity(d, d);
    jitter *= 10;
  }
  throw NumericalError("adaptive_mh: proposal covariance is not positive definite");
}

}  // namespace

MhResult adaptive_mh(const TargetModel& model, std::size_t iters, std::uint64_t seed, const MhOptions& opts) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  require(opts.burn_in_fraction >= 0 && opts.burn_in_fraction < 1, "adaptive_mh: burn-in fraction must be in [0,1)");
  require(opts.target_acceptance > 0 && opts.target_acceptance < 1, "adaptive_mh: target acceptance must be in (0,1)");
  require(opts.zero_accept_window >= 1, "adaptive_mh: zero-acceptance window must be positive");
  const auto burn = static_cast<std::size_t>(std::floor(opts.burn_in_fraction * static_cast<double>(iters)));
  require(iters > burn, "adaptive_mh: iters must exceed the burn-in");

  Vector x = opts.x0 ? *opts.x0 : Vector::Zero(d);
  require_dim(model.dim(), x.size(), "adaptive_mh x0");
  require_finite(x, "adaptive_mh x0");
  Matrix cov0 = opts.initial_cov ? *opts.initial_cov : Matrix::Identity(d, d);
  require(cov0.rows() == d && cov0.cols() == d, "adaptive_mh: initial covariance has the wrong shape");

  double logp = log_target(model, x, opts.domain_radius);
  if (!std::isfinite(logp)) throw InvalidArgument("adaptive_mh: initial point has zero or non-finite density");

  Rng rng = make_rng(seed);
  // Proposal N(x, s² Σ) with the (2.38²/d) Haario scale folded into s.
  double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(d)));
  Matrix chol = stable_cholesky(cov0);

  Vector mean = x;
  Matrix m2 = Matrix::Zero(d, d);
  std::size_t seen = 1;
  const std::size_t recompute_every = std::max<std::size_t>(1, std::min<std::size_t>(100, burn / 50 + 1));

  MhResult out;
  out.burn_in = burn;
  out.samples.points.resize(static_cast<Eigen::Index>(iters - burn), d);
  out.samples.label = "adaptive-mh:" + model.name();
  out.samples.seed = seed;

  Vector z(d), y(d);
  std::size_t accepted_post = 0, since_accept = 0;
  for (std::size_t it = 0; it < iters; ++it) {
    fill_standard_normal(rng, z);
    y.noalias() = x + std::exp(log_scale) * (chol * z);
    const double logq = log_target(model, y, opts.domain_radius);
    const double log_ratio = logq - logp;
    const double accept_prob = std::isfinite(logq) ? std::min(1.0, std::exp(std::min(0.0, log_ratio))) : 0.0;
    const bool accept = std::log(uniform01(rng)) < log_ratio && std::isfinite(logq);
    if (accept) {
      x = y;
      logp = logq;
      since_accept = 0;
    } else if (++since_accept >= opts.zero_accept_window) {
      throw NumericalError("adaptive_mh: no acceptances in " + std::to_string(opts.zero_accept_window) +
                           " iterations ending at " + std::to_string(it) + "; the proposal is badly scaled");
    }

    if (it < burn) {
      // Robbins–Monro scale update and running covariance (Welford).
      const double rate = 1.0 / std::pow(static_cast<double>(it + 1), 0.6);
      log_scale += rate * (accept_prob - opts.target_acceptance);
      ++seen;
      const Vector delta = x - mean;
      mean += delta / static_cast<double>(seen);
      m2.noalias() += delta * (x - mean).transpose();
      if ((it + 1) % recompute_every == 0 && seen > static_cast<std::size_t>(2 * d)) {
        Matrix emp = m2 / static_cast<double>(seen - 1);
        emp = 0.5 * (emp + emp.transpose()).eval();
        // Shrink toward the initial covariance while the history is short.
        const double w = static_cast<double>(seen) / (static_cast<double>(seen) + 10.0 * static_cast<double>(d));
        chol = stable_cholesky(w * emp + (1.0 - w) * cov0 + 1e-10 * Matrix::Identity(d, d));
      }
    } else {
      if (accept) ++accepted_post;
      out.samples.points.row(static_cast<Eigen::Index>(it - burn)) = x.transpose();
    }
  }
  out.acceptance_rate = static_cast<double>(accepted_post) / static_cast<double>(iters - burn);
  out.proposal_cov = std::exp(2.0 * log_scale) * chol * chol.transpose();
  return out;
}

}  // namespace driftbound
