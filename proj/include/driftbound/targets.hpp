#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "driftbound/core.hpp"
#include "driftbound/rng.hpp"
#include "driftbound/sample_set.hpp"

namespace driftbound {

// Unnormalized target density with hand-coded derivatives. Implementations
// are immutable after construction and safe for concurrent reads.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;

  /// log π(x) up to an additive constant.
  virtual double log_density(ConstVecRef x) const = 0;

  /// Unchecked hot-path gradient; `out` must already have length dim().
  virtual void grad_log_density_into(ConstVecRef x, VecRef out) const = 0;

  virtual std::optional<Matrix> hessian(ConstVecRef /*x*/) const { return std::nullopt; }

  /// Certified strong log-concavity constant k, if one is known.
  virtual std::optional<double> concavity() const { return std::nullopt; }
  /// Lipschitz constant of ∇log π, if one is known.
  virtual std::optional<double> lipschitz() const { return std::nullopt; }
  /// Bound on ‖H[∂_j log π]‖₂ over j (third-derivative size), if known.
  virtual std::optional<double> hessian_lipschitz() const { return std::nullopt; }

  virtual bool has_exact_sampler() const { return false; }
  virtual void sample_into(Rng& /*rng*/, VecRef /*out*/) const;

  /// Checked gradient: rejects wrong lengths and non-finite inputs.
  Vector grad_log_density(ConstVecRef x) const;
};

using TargetPtr = std::shared_ptr<const TargetModel>;

// N(μ, σ²I).
class GaussianTarget final : public TargetModel {
 public:
  GaussianTarget(Vector mean, double variance);
  static std::shared_ptr<GaussianTarget> standard(std::size_t d);

  std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }
  std::string name() const override { return "gaussian"; }
  double log_density(ConstVecRef x) const override;
  void grad_log_density_into(ConstVecRef x, VecRef out) const override;
  std::optional<Matrix> hessian(ConstVecRef x) const override;
  std::optional<double> concavity() const override { return 1.0 / variance_; }
  std::optional<double> lipschitz() const override { return 1.0 / variance_; }
  std::optional<double> hessian_lipschitz() const override { return 0.0; }
  bool has_exact_sampler() const override { return true; }
  void sample_into(Rng& rng, VecRef out) const override;

  const Vector& mean() const { return mean_; }
  double variance() const { return variance_; }

 private:
  Vector mean_;
  double variance_;
};

// Equal-weight mixture of N(δ/2, I) and N(−δ/2, I). The density is
// proportional to exp(−‖x‖²/2)·cosh(x·δ/2), which is how it is evaluated.
class GaussianMixture2 final : public TargetModel {
 public:
  explicit GaussianMixture2(Vector delta);

  std::size_t dim() const override { return static_cast<std::size_t>(delta_.size()); }
  std::string name() const override { return "mixture2"; }
  double log_density(ConstVecRef x) const override;
  void grad_log_density_into(ConstVecRef x, VecRef out) const override;
  std::optional<Matrix> hessian(ConstVecRef x) const override;
  /// 1 − ‖δ‖₂/4 when ‖δ‖₂ < 2, otherwise none. A direct Hessian bound gives
  /// the larger 1 − ‖δ‖₂²/4; the published constant is kept on purpose.
  std::optional<double> concavity() const override;
  std::optional<double> lipschitz() const override;
  bool has_exact_sampler() const override { return true; }
  void sample_into(Rng& rng, VecRef out) const override;

  const Vector& delta() const { return delta_; }

 private:
  Vector delta_;
};

// Scalar link φ with derivatives up to third order plus the constants the
// GLM analysis needs. Any derivative may be left empty; operations that need
// a missing one throw Unsupported.
struct ScalarLink {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
  std::optional<double> lipschitz_d1;  // L_φ ≥ sup |φ''|
  std::optional<double> third_bound;   // M_φ ≥ sup |φ'''|
  // inf{−φ''(t) : |t| ≤ bound}; bound = +inf means the whole real line.
  std::function<double(double)> concavity_on;
};

/// φ(t) = −log(1 + e^{−t}).
ScalarLink logistic_link();
/// φ(t) = −t²/2.
ScalarLink quadratic_link();

// Unnormalized posterior L(x) = log π₀(x) + Σ_i φ(x·y_i) with a single
// shared link. Rows of `data` are the y_i.
class GLMPosterior final : public TargetModel {
 public:
  GLMPosterior(TargetPtr prior, ScalarLink link, Matrix data);

  std::size_t dim() const override { return prior_->dim(); }
  std::string name() const override { return "glm_" + link_.name; }
  double log_density(ConstVecRef x) const override;
  void grad_log_density_into(ConstVecRef x, VecRef out) const override;
  std::optional<Matrix> hessian(ConstVecRef x) const override;
  /// k₀ + k_φ λ_min(A_N) on the unbounded domain.
  std::optional<double> concavity() const override;
  /// L_N = L₀ + L_φ S₂.
  std::optional<double> lipschitz() const override;

  const TargetModel& prior() const { return *prior_; }
  const ScalarLink& link() const { return link_; }
  const Matrix& data() const { return data_; }
  Eigen::Index data_count() const { return data_.rows(); }

  /// ‖A_N‖₂ with A_N = Σ y_i y_iᵀ (power iteration, rel. tol 1e-8).
  double data_spectral_norm() const { return a_norm_; }
  /// λ_min(A_N); 0 without data.
  double data_min_eigenvalue() const { return a_min_; }
  /// S_k = Σ ‖y_i‖₂^k for k = 2, 3.
  double s2() const { return s2_; }
  double s3() const { return s3_; }
  double max_data_norm() const { return max_norm_; }

 private:
  TargetPtr prior_;
  ScalarLink link_;
  Matrix data_;
  double a_norm_ = 0.0;
  double a_min_ = 0.0;
  double s2_ = 0.0;
  double s3_ = 0.0;
  double max_norm_ = 0.0;
};

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration, stopping at relative change ≤ rel_tol.
double spectral_norm_psd(const Matrix& a, double rel_tol = 1e-8, int max_iter = 100000);

Vector grad_log_density(const TargetModel& model, ConstVecRef x);
std::optional<double> strong_concavity_constant(const TargetModel& model);

struct ModeOptions {
  double grad_tol = 1e-10;
  int max_iter = 10000;
};

/// Maximizer of log π by damped Newton with backtracking; plain gradient
/// ascent with backtracking when no Hessian is available. Throws
/// NumericalError (reporting the final gradient norm) on non-convergence.
Vector find_mode(const TargetModel& model, ConstVecRef x0, const ModeOptions& opts = {});
Vector find_mode(const GLMPosterior& model, const ModeOptions& opts = {});

/// n i.i.d. exact draws; Unsupported for models without an exact sampler.
SampleSet sample_exact(const TargetModel& model, Eigen::Index n, std::uint64_t seed);

// Family + parameters, as read from a config section:
//   family = gaussian | mixture2 | glm_logistic
//   dim, sigma (gaussian std-dev), mean (comma list), delta (comma list),
//   data (CSV path with x0.. columns, for GLMs), prior_sigma.
TargetPtr make_target(const std::map<std::string, std::string>& params);

}  // namespace driftbound
