#include "driftbound/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "driftbound/assignment.hpp"
#include "driftbound/rng.hpp"

namespace driftbound {

namespace {

void check_pair(const SampleSet& a, const SampleSet& b, const char* what) {
  a.validate();
  b.validate();
  if (a.size() != b.size())
    throw InvalidArgument(std::string(what) + ": sample sets must have equal sizes (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  if (a.dim() != b.dim()) throw InvalidArgument(std::string(what) + ": sample sets have different dimensions");
}

double sorted_distance(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

std::vector<double> column(const Matrix& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

}  // namespace

double wasserstein_1d(const SampleSet& a, const SampleSet& b) {
  check_pair(a, b, "wasserstein_1d");
  if (a.dim() != 1) throw InvalidArgument("wasserstein_1d: samples must be one-dimensional");
  return sorted_distance(column(a.points, 0), column(b.points, 0));
}

double wasserstein_assignment(const SampleSet& a, const SampleSet& b, Eigen::Index cap) {
  check_pair(a, b, "wasserstein_assignment");
  const Eigen::Index n = a.size();
  if (n > cap)
    throw InvalidArgument("wasserstein_assignment: " + std::to_string(n) + " points exceed the cap of " +
                          std::to_string(cap) + "; subsample or use the sliced estimate");
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (a.points.row(i) - b.points.row(j)).norm();
  return solve_assignment(cost).total_cost / static_cast<double>(n);
}

double wasserstein_sliced(const SampleSet& a, const SampleSet& b, int projections, std::uint64_t seed) {
  check_pair(a, b, "wasserstein_sliced");
  require(projections >= 1, "wasserstein_sliced: need at least one projection");
  Rng rng = make_rng(seed);
  Vector u(a.dim());
  double total = 0.0;
  for (int p = 0; p < projections; ++p) {
    do fill_standard_normal(rng, u);
    while (u.norm() < 1e-12);
    u.normalize();
    const Vector pa = a.points * u, pb = b.points * u;
    total += sorted_distance(std::vector<double>(pa.data(), pa.data() + pa.size()),
                             std::vector<double>(pb.data(), pb.data() + pb.size()));
  }
  return total / projections;
}

DistanceRecord wasserstein(const SampleSet& a, const SampleSet& b, std::uint64_t seed, Eigen::Index cap) {
  DistanceRecord r;
  r.n = a.size();
  r.d = static_cast<std::size_t>(a.dim());
  r.label_a = a.label;
  r.label_b = b.label;
  r.seed = seed;
  if (a.dim() == 1) {
    r.method = "sorted-1d";
    r.value = wasserstein_1d(a, b);
  } else if (a.size() <= cap) {
    r.method = "assignment";
    r.value = wasserstein_assignment(a, b, cap);
  } else {
    r.method = "sliced";
    r.value = wasserstein_sliced(a, b, 64, seed);
  }
  return r;
}

nlohmann::json to_json(const DistanceRecord& r) {
  return {{"method", r.method}, {"value", r.value}, {"n", r.n}, {"d", r.d},
          {"a", r.label_a},     {"b", r.label_b},   {"seed", r.seed}};
}

ContractivityFit estimate_contractivity(const DriftField& drift, const Vector& x0, const Vector& x0p, double dt,
                                        double t_end, std::size_t reps, std::uint64_t seed) {
  require_dim(drift.dim, x0.size(), "estimate_contractivity x0");
  require_dim(drift.dim, x0p.size(), "estimate_contractivity x0'");
  require_finite(x0, "estimate_contractivity x0");
  require_finite(x0p, "estimate_contractivity x0'");
  const double gap0 = (x0 - x0p).norm();
  require(gap0 > 0, "estimate_contractivity: starting points must differ");
  require(dt > 0 && t_end > dt, "estimate_contractivity: need 0 < dt < t_end");
  require(reps >= 1, "estimate_contractivity: reps must be positive");

  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
  std::vector<double> mean_gap(steps + 1, 0.0);
  const auto d = x0.size();
  Vector x(d), xp(d), bx(d), bxp(d), xi(d);
  const double noise = std::sqrt(2.0 * dt);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = make_rng(derive_seed(seed, r));
    x = x0;
    xp = x0p;
    mean_gap[0] += gap0;
    for (std::size_t k = 1; k <= steps; ++k) {
      drift.eval_into(x, bx);
      drift.eval_into(xp, bxp);
      fill_standard_normal(rng, xi);
      x += dt * bx + noise * xi;
      xp += dt * bxp + noise * xi;
      if (!x.allFinite() || !xp.allFinite() || x.norm() > kDivergenceNorm || xp.norm() > kDivergenceNorm)
        throw NumericalError("estimate_contractivity: divergence at step " + std::to_string(k));
      mean_gap[k] += (x - xp).norm();
    }
  }

  // Least squares of log mean gap on t over the post-transient part, up to
  // the first step where the gap underflows.
  const auto first = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(steps)));
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t used = 0;
  for (std::size_t k = first; k <= steps; ++k) {
    const double g = mean_gap[k] / static_cast<double>(reps);
    if (!(g > 1e-280)) break;
    const double t = static_cast<double>(k) * dt, y = std::log(g);
    sw += 1;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++used;
  }
  if (used < 2) throw NumericalError("estimate_contractivity: too few usable points for a fit");
  const double denom = sw * stt - st * st;
  const double slope = (sw * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / sw;
  if (!(slope < 0)) throw NumericalError("estimate_contractivity: no contraction detected");
  ContractivityFit fit;
  fit.slope = slope;
  fit.intercept = intercept;
  fit.points = used;
  fit.cert = ExponentialCert{std::exp(intercept) / gap0, std::exp(slope), "fitted"};
  return fit;
}

TestFunction coordinate_test_function(Eigen::Index j) {
  require(j >= 0, "test function: negative coordinate");
  return {"x" + std::to_string(j), [j](const Vector& x) { return x[j]; },
          [j](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            g[j] = 1.0;
            return g;
          },
          [](const Vector&) { return 0.0; }};
}

TestFunction square_test_function(Eigen::Index j) {
  require(j >= 0, "test function: negative coordinate");
  return {"x" + std::to_string(j) + "^2", [j](const Vector& x) { return x[j] * x[j]; },
          [j](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            g[j] = 2.0 * x[j];
            return g;
          },
          [](const Vector&) { return 2.0; }};
}

TestFunction sine_test_function(Eigen::Index j) {
  require(j >= 0, "test function: negative coordinate");
  return {"sin(x" + std::to_string(j) + ")", [j](const Vector& x) { return std::sin(x[j]); },
          [j](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            g[j] = std::cos(x[j]);
            return g;
          },
          [j](const Vector& x) { return -std::sin(x[j]); }};
}

GeneratorMean generator_mean_stats(const TargetModel& model, const TestFunction& phi, const SampleSet& samples) {
  samples.validate();
  require_dim(model.dim(), samples.dim(), "generator_mean samples");
  require(phi.gradient && phi.laplacian, "generator_mean: test function needs a gradient and a Laplacian");
  const Eigen::Index n = samples.size();
  Vector x(samples.dim()), b(samples.dim());
  double mean = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    x = samples.points.row(i).transpose();
    model.grad_log_density_into(x, b);
    const double v = b.dot(phi.gradient(x)) + phi.laplacian(x);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  GeneratorMean out;
  out.mean = mean;
  out.n = n;
  out.standard_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return out;
}

double generator_mean(const TargetModel& model, const TestFunction& phi, const SampleSet& samples) {
  return generator_mean_stats(model, phi, samples).mean;
}

}  // namespace driftbound
