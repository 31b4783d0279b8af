#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "driftbound/core.hpp"
#include "driftbound/samplers.hpp"
#include "driftbound/targets.hpp"

namespace driftbound {

// d_W(δ_x P_t, δ_x' P_t) ≤ C‖x − x'‖ρ^t.
struct ExponentialCert {
  double C = 1.0;
  double rho = 0.0;
  std::string provenance = "asserted";

  void validate() const;
};

// d_W(δ_x P_t, δ_x' P_t) ≤ C‖x − x'‖(t + β)^{−α}.
struct PolynomialCert {
  double C = 1.0;
  double alpha = 2.0;
  double beta = 1.0;
  std::string provenance = "asserted";

  void validate() const;
};

using ContractivityCertificate = std::variant<ExponentialCert, PolynomialCert>;
std::string certificate_provenance(const ContractivityCertificate& cert);

/// Cε / log(1/ρ).
double bound_exponential(const ExponentialCert& cert, double eps);
/// C·E_π̃[ε(X̃)] / log(1/ρ) for a stochastic drift whose conditional bias at x
/// is bounded by ε(x).
double bound_stochastic(const ExponentialCert& cert, double expected_eps);
/// Cε / ((α − 1)β^{α−1}).
double bound_polynomial(const PolynomialCert& cert, double eps);
/// Zig-zag switching-rate perturbation: eps_l1 bounds ‖λ − λ̃‖₁.
double bound_zzp(const PolynomialCert& cert, double eps_l1);
/// (C_F ε_F + C_A ε_A) / ((α − 1)β^{α−1}) for a PDMP with perturbed flow
/// (F) and jump kernel (A).
double bound_pdmp(double c_flow, double eps_flow, double c_jump, double eps_jump, double alpha, double beta);

/// (C = 1, ρ = e^{−k}).
ExponentialCert cert_from_strong_concavity(double k);

// Lower envelope of the contractivity profile κ(r): κ ≥ −ℓ on r ≤ R and
// κ ≥ k beyond R. R0 is the radius up to which C integrates the negative
// part, so C = exp(ℓ min(R0, R)²/8).
struct EberleProfile {
  double R = 0.0;
  double ell = 0.0;
  double k = 0.0;
  double R0 = 0.0;
};

/// Certificate for targets that are strongly log-concave outside a ball.
/// ρ = exp(−1/B), where B bounds 1/log(1/ρ): (3e/2)max(R², 8/k) when
/// ℓR0² ≤ 8, and otherwise 8√(2π)R⁻¹ℓ^{−1/2}(1/ℓ + 1/k)e^{ℓR²/8} + 32R⁻²k⁻².
ExponentialCert cert_eberle(const EberleProfile& profile);
/// The B above, i.e. the bound on 1/log(1/ρ).
double eberle_inverse_rate_bound(const EberleProfile& profile);

// Step schedule of the decreasing-step ULA bound.
struct UlaSchedule {
  StepSchedule schedule;
  double kappa = 0.0;
  // Set when k and L were supplied: γ₁ < 1/(k + L).
  std::optional<bool> condition_holds;
};

/// γ₁ = 2(1 − α)κ⁻¹(2/T)^{1−α} log(κT/(2(1 − α))).
UlaSchedule ula_step_schedule(double kappa, std::size_t T, double alpha);
/// Same, with κ = 2kL/(k + L) and the step condition evaluated.
UlaSchedule ula_step_schedule(double k, double L, std::size_t T, double alpha);
/// κ = 2kL/(k + L).
double ula_kappa(double k, double L);

/// 16(1 − α)L²κ⁻³ d T⁻¹ log(κT/(2(1 − α))), a bound on the squared
/// Wasserstein distance after T steps. Throws InvalidArgument if the step
/// condition fails.
double ula_finite_sample_bound(double k, double L, std::size_t d, std::size_t T, double alpha);

// Inner-product accounting: the exact chain costs T·N, the approximate
// chain (T̃ + N)·d.
struct BudgetModel {
  std::size_t N = 0;
  std::size_t d = 0;
  std::size_t T = 0;
  std::size_t T_tilde = 0;
  // T·N − (T̃ + N)·d, in [0, d) for a matched budget.
  long long residual = 0;
};

/// T̃ = floor(N(T/d − 1)). Throws if T ≤ d.
std::size_t matched_budget_steps(std::size_t N, std::size_t T, std::size_t d);
BudgetModel matched_budget(std::size_t N, std::size_t T, std::size_t d);

struct GlmConstants {
  double k_N = 0.0;           // k₀ + k_φ λ_min(A_N)
  double k_N_spectral = 0.0;  // k₀ + k_φ ‖A_N‖₂, which overstates k_N unless A_N ∝ I
  double L_N = 0.0;
  double M_N = 0.0;
  double a_norm = 0.0;
  double a_min = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double k_link = 0.0;
};

/// k_N = k₀ + k_φλ_min(A_N), L_N = L₀ + L_φS₂, M_N = M₀ + M_φS₃. With a domain
/// radius, k_φ is the infimum of −φ'' over the reachable arguments
/// |t| ≤ radius·max‖y‖; without one it is the link's global value.
GlmConstants glm_constants(const GLMPosterior& model, std::optional<double> domain_radius = std::nullopt);

// Audit record of one bound evaluation.
struct BoundRecord {
  std::string formula;
  std::map<std::string, double> inputs;
  std::optional<double> value;
  std::string provenance;
};
nlohmann::json to_json(const BoundRecord& r);

}  // namespace driftbound
