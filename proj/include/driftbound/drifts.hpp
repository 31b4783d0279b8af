#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "driftbound/core.hpp"
#include "driftbound/sample_set.hpp"
#include "driftbound/targets.hpp"

namespace driftbound {

using DriftFn = std::function<void(ConstVecRef x, VecRef out)>;

// Vector field b: R^d → R^d. Evaluation is pure; captured state (models,
// precomputed matrices) is immutable and shared.
struct DriftField {
  std::size_t dim = 0;
  DriftFn fn;
  std::optional<double> lipschitz;
  std::string label;

  void eval_into(ConstVecRef x, VecRef out) const { fn(x, out); }
  Vector operator()(ConstVecRef x) const;
};

// Auxiliary-process drift: dX = combine(X, Y) dt + √2 dW^X,
// dY = aux_drift(Y) dt + aux_noise dW^Y.
struct StochasticDriftSpec {
  DriftField base;
  std::size_t aux_dim = 0;
  DriftFn aux_drift;
  Matrix aux_noise;
  std::function<void(ConstVecRef x, ConstVecRef y, VecRef out)> combine;
  std::string label;
};

DriftField exact_drift(TargetPtr model);
DriftField zero_drift(std::size_t d);
/// x ↦ field(x) + eps.
DriftField offset_drift(const DriftField& field, const Vector& eps);

/// Second-order Taylor drift H(x*)(x − x*), where H is the Hessian of the
/// log posterior at x*. The matrix is built once at construction.
DriftField taylor2_drift(std::shared_ptr<const GLMPosterior> model, const Vector& x_star);
/// Expansion at the posterior mode.
DriftField taylor2_drift(std::shared_ptr<const GLMPosterior> model);

/// √d‖x − x*‖² (M₀ + M_φ S₃): coordinate-wise remainder bound on
/// ‖b(x) − b̃(x)‖₂ for the Taylor drift.
double taylor_remainder_bound(const GLMPosterior& model, const Vector& x_star, const Vector& x);

/// Radial tilt added to `field`: zero for ‖x‖ < R/2, −(ε/2)(2‖x‖/R − 1)x/‖x‖
/// for R/2 ≤ ‖x‖ < R and −εx/(2‖x‖) beyond R. The added term has norm at
/// most ε/2 and points inward.
DriftField tail_regularized_drift(const DriftField& field, double eps, double radius);
Vector tail_tilt(const Vector& x, double eps, double radius);

/// OU auxiliary process dY = −αY dt + √(2v) dW^Y with combine(x, y) = b(x) + y.
StochasticDriftSpec ou_stochastic_drift(const DriftField& base, double alpha, double v);

/// max over probe rows of ‖a(x) − b(x)‖₂. A lower bound on the true sup.
double drift_error_sup(const DriftField& a, const DriftField& b, const SampleSet& probe);

/// Probe points for drift_error_sup: an isotropic Gaussian cloud around
/// `center` with standard deviation `scale`.
SampleSet gaussian_probe_cloud(const Vector& center, double scale, Eigen::Index n, std::uint64_t seed);

// Config/audit form of a drift: {"kind": ..., "params": {...}}. Kinds:
// exact, offset (eps: list), taylor2 (GLM models only), tail_regularized
// (eps, radius; applied on top of the exact drift).
struct DriftRecord {
  std::string kind;
  std::map<std::string, std::string> params;
};

nlohmann::json to_json(const DriftRecord& r);
DriftRecord drift_record_from_json(const nlohmann::json& j);
DriftField make_drift(const DriftRecord& record, TargetPtr model);

}  // namespace driftbound
