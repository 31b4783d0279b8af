#pragma once

#include <cmath>
#include <memory>

#include "driftbound/rng.hpp"
#include "driftbound/targets.hpp"

namespace testutil {

using driftbound::Matrix;
using driftbound::Vector;

// Centered finite-difference gradient of log π.
inline Vector fd_gradient(const driftbound::TargetModel& m, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (m.log_density(a) - m.log_density(b)) / (2 * h);
  }
  return g;
}

inline Vector random_point(driftbound::Rng& rng, Eigen::Index d, double scale) {
  return scale * driftbound::standard_normal(rng, d);
}

inline double mean(const Eigen::VectorXd& v) { return v.mean(); }
inline double var(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

inline std::shared_ptr<driftbound::GLMPosterior> small_logistic_model(Eigen::Index n, std::uint64_t seed) {
  driftbound::Rng rng(seed);
  Matrix ys(n, 4);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < 4; ++j) ys(i, j) = rng.normal() + (j < 2 ? 0.5 : -0.5);
  return std::make_shared<driftbound::GLMPosterior>(driftbound::GaussianTarget::standard(4),
                                                    driftbound::logistic_link(), ys);
}

}  // namespace testutil
