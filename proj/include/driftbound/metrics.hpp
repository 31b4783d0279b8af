#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "json.hpp"

#include "driftbound/bounds.hpp"
#include "driftbound/core.hpp"
#include "driftbound/drifts.hpp"
#include "driftbound/sample_set.hpp"
#include "driftbound/targets.hpp"

namespace driftbound {

inline constexpr Eigen::Index kAssignmentCap = 1024;

/// Exact W1 between two equal-size 1-D empirical measures: the mean absolute
/// difference of order statistics.
double wasserstein_1d(const SampleSet& a, const SampleSet& b);

/// Exact W1 between equal-size empirical measures in any dimension, by
/// minimum-cost assignment under Euclidean cost. Throws InvalidArgument
/// above `cap` points.
double wasserstein_assignment(const SampleSet& a, const SampleSet& b, Eigen::Index cap = kAssignmentCap);

/// Averaged 1-D distances over random unit projections. A lower bound on W1,
/// only meant for sets above the assignment cap.
double wasserstein_sliced(const SampleSet& a, const SampleSet& b, int projections, std::uint64_t seed);

struct DistanceRecord {
  std::string method;  // "sorted-1d" | "assignment" | "sliced"
  double value = 0.0;
  Eigen::Index n = 0;
  std::size_t d = 0;
  std::string label_a, label_b;
  std::uint64_t seed = 0;
};
nlohmann::json to_json(const DistanceRecord& r);

/// Sorted method in 1-D, assignment up to `cap`, otherwise sliced with 64
/// projections (labeled as such).
DistanceRecord wasserstein(const SampleSet& a, const SampleSet& b, std::uint64_t seed = 0,
                           Eigen::Index cap = kAssignmentCap);

struct ContractivityFit {
  ExponentialCert cert;
  double slope = 0.0;      // fitted d/dt log E‖X_t − X'_t‖
  double intercept = 0.0;  // fitted log E‖X_t − X'_t‖ at t = 0
  std::size_t points = 0;
};

/// Synchronously coupled Euler–Maruyama pairs (shared noise) from x0 and
/// x0p; regresses log E‖X_t − X'_t‖ on t after discarding the first 10% of
/// the horizon. C = exp(intercept)/‖x0 − x0p‖, ρ = exp(slope). Throws
/// NumericalError("no contraction detected") if ρ ≥ 1.
ContractivityFit estimate_contractivity(const DriftField& drift, const Vector& x0, const Vector& x0p, double dt,
                                        double t_end, std::size_t reps, std::uint64_t seed);

// φ with analytic gradient and Laplacian.
struct TestFunction {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<double(const Vector&)> laplacian;
};
TestFunction coordinate_test_function(Eigen::Index j);  // x_j
TestFunction square_test_function(Eigen::Index j);      // x_j²
TestFunction sine_test_function(Eigen::Index j);        // sin x_j

struct GeneratorMean {
  double mean = 0.0;
  double standard_error = 0.0;
  Eigen::Index n = 0;
};

/// Monte Carlo mean of (A φ)(x) = ∇log π(x)·∇φ(x) + Δφ(x) over the samples,
/// with its standard error.
GeneratorMean generator_mean_stats(const TargetModel& model, const TestFunction& phi, const SampleSet& samples);
double generator_mean(const TargetModel& model, const TestFunction& phi, const SampleSet& samples);

}  // namespace driftbound
