#include "driftbound/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace driftbound {

namespace {

void require_eps(double eps, const char* what) {
  if (!std::isfinite(eps) || eps < 0) throw InvalidArgument(std::string(what) + ": eps must be a nonnegative number");
}

double polynomial_denominator(double alpha, double beta) {
  if (!(alpha > 1) || !std::isfinite(alpha))
    throw InvalidArgument("polynomial bound: alpha must exceed 1 (the decay integral diverges otherwise)");
  if (!(beta > 0) || !std::isfinite(beta)) throw InvalidArgument("polynomial bound: beta must be positive");
  return (alpha - 1.0) * std::pow(beta, alpha - 1.0);
}

}  // namespace

void ExponentialCert::validate() const {
  if (!(C > 0) || !std::isfinite(C)) throw InvalidArgument("exponential certificate: C must be positive");
  if (!(rho > 0 && rho < 1)) throw InvalidArgument("exponential certificate: rho must lie in (0, 1)");
}

void PolynomialCert::validate() const {
  if (!(C > 0) || !std::isfinite(C)) throw InvalidArgument("polynomial certificate: C must be positive");
  polynomial_denominator(alpha, beta);
}

std::string certificate_provenance(const ContractivityCertificate& cert) {
  return std::visit([](const auto& c) { return c.provenance; }, cert);
}

double bound_exponential(const ExponentialCert& cert, double eps) {
  cert.validate();
  require_eps(eps, "bound_exponential");
  return cert.C * eps / -std::log(cert.rho);
}

double bound_stochastic(const ExponentialCert& cert, double expected_eps) {
  cert.validate();
  require_eps(expected_eps, "bound_stochastic");
  return cert.C * expected_eps / -std::log(cert.rho);
}

double bound_polynomial(const PolynomialCert& cert, double eps) {
  cert.validate();
  require_eps(eps, "bound_polynomial");
  return cert.C * eps / polynomial_denominator(cert.alpha, cert.beta);
}

double bound_zzp(const PolynomialCert& cert, double eps_l1) { return bound_polynomial(cert, eps_l1); }

double bound_pdmp(double c_flow, double eps_flow, double c_jump, double eps_jump, double alpha, double beta) {
  require_eps(eps_flow, "bound_pdmp flow");
  require_eps(eps_jump, "bound_pdmp jump");
  if (!(c_flow >= 0) || !(c_jump >= 0) || !std::isfinite(c_flow) || !std::isfinite(c_jump))
    throw InvalidArgument("bound_pdmp: constants must be nonnegative");
  // An unperturbed component contributes nothing whatever its constant.
  const double num = (eps_flow > 0 ? c_flow * eps_flow : 0.0) + (eps_jump > 0 ? c_jump * eps_jump : 0.0);
  return num / polynomial_denominator(alpha, beta);
}

ExponentialCert cert_from_strong_concavity(double k) {
  if (!(k > 0) || !std::isfinite(k)) throw InvalidArgument("cert_from_strong_concavity: k must be positive");
  return ExponentialCert{1.0, std::exp(-k), "strong-concavity"};
}

double eberle_inverse_rate_bound(const EberleProfile& p) {
  if (!(p.k > 0) || !std::isfinite(p.k)) throw InvalidArgument("cert_eberle: k must be positive");
  if (!(p.R >= 0) || !(p.ell >= 0) || !(p.R0 >= 0) || !std::isfinite(p.R) || !std::isfinite(p.ell) ||
      !std::isfinite(p.R0))
    throw InvalidArgument("cert_eberle: R, ell and R0 must be nonnegative");
  if (p.R0 > p.R) throw InvalidArgument("cert_eberle: R0 must not exceed R");
  if (p.ell * p.R0 * p.R0 <= 8.0) return 1.5 * std::numbers::e * std::max(p.R * p.R, 8.0 / p.k);
  // Here ℓR0² > 8 forces R ≥ R0 > 0 and ℓ > 0.
  const double R = p.R, l = p.ell, k = p.k;
  return 8.0 * std::sqrt(2.0 * std::numbers::pi) / (R * std::sqrt(l)) * (1.0 / l + 1.0 / k) *
             std::exp(l * R * R / 8.0) +
         32.0 / (R * R * k * k);
}

ExponentialCert cert_eberle(const EberleProfile& p) {
  const double inv = eberle_inverse_rate_bound(p);
  // ¼∫₀^{R0} r·κ(r)⁻ dr with κ⁻ = ℓ on [0, R] and 0 beyond.
  const double r = std::min(p.R0, p.R);
  const double c = std::exp(p.ell * r * r / 8.0);
  ExponentialCert cert{c, std::exp(-1.0 / inv), "eberle"};
  if (!(cert.rho < 1) || !(cert.rho > 0) || !std::isfinite(c))
    throw NumericalError("cert_eberle: constants overflow double precision for this profile");
  return cert;
}

double ula_kappa(double k, double L) {
  if (!(k > 0) || !(L > 0) || !std::isfinite(k) || !std::isfinite(L))
    throw InvalidArgument("ula_kappa: k and L must be positive");
  return 2.0 * k * L / (k + L);
}

UlaSchedule ula_step_schedule(double kappa, std::size_t T, double alpha) {
  if (!(kappa > 0) || !std::isfinite(kappa)) throw InvalidArgument("ula_step_schedule: kappa must be positive");
  if (T < 2) throw InvalidArgument("ula_step_schedule: T must be at least 2");
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("ula_step_schedule: alpha must lie in (0, 1)");
  const double t = static_cast<double>(T);
  const double arg = kappa * t / (2.0 * (1.0 - alpha));
  if (!(arg > 1)) throw InvalidArgument("ula_step_schedule: log argument κT/(2(1−α)) must exceed 1; increase T");
  const double g1 = 2.0 * (1.0 - alpha) / kappa * std::pow(2.0 / t, 1.0 - alpha) * std::log(arg);
  UlaSchedule s;
  s.schedule = StepSchedule::power(g1, alpha);
  s.kappa = kappa;
  return s;
}

UlaSchedule ula_step_schedule(double k, double L, std::size_t T, double alpha) {
  UlaSchedule s = ula_step_schedule(ula_kappa(k, L), T, alpha);
  s.condition_holds = s.schedule.gamma1 < 1.0 / (k + L);
  return s;
}

double ula_finite_sample_bound(double k, double L, std::size_t d, std::size_t T, double alpha) {
  if (d < 1) throw InvalidArgument("ula_finite_sample_bound: d must be positive");
  UlaSchedule s = ula_step_schedule(k, L, T, alpha);
  if (!*s.condition_holds)
    throw InvalidArgument("ula_finite_sample_bound: step condition γ₁ < 1/(k+L) fails (γ₁ = " +
                          std::to_string(s.schedule.gamma1) + "); use a larger T");
  const double kappa = s.kappa, t = static_cast<double>(T);
  return 16.0 * (1.0 - alpha) * L * L / (kappa * kappa * kappa) * static_cast<double>(d) / t *
         std::log(kappa * t / (2.0 * (1.0 - alpha)));
}

BudgetModel matched_budget(std::size_t N, std::size_t T, std::size_t d) {
  if (d < 1) throw InvalidArgument("matched_budget_steps: d must be positive");
  if (T <= d) throw InvalidArgument("matched_budget_steps: the exact chain must run for T > d steps");
  BudgetModel b{N, d, T, 0, 0};
  // floor(N(T − d)/d) in integer arithmetic avoids rounding T/d.
  b.T_tilde = N * (T - d) / d;
  b.residual = static_cast<long long>(T * N) - static_cast<long long>((b.T_tilde + N) * d);
  return b;
}

std::size_t matched_budget_steps(std::size_t N, std::size_t T, std::size_t d) { return matched_budget(N, T, d).T_tilde; }

GlmConstants glm_constants(const GLMPosterior& model, std::optional<double> domain_radius) {
  const auto& link = model.link();
  auto k0 = model.prior().concavity();
  auto l0 = model.prior().lipschitz();
  auto m0 = model.prior().hessian_lipschitz();
  if (!k0 || !l0 || !m0) throw Unsupported("glm_constants: prior constants (k0, L0, M0) unavailable");
  if (!link.lipschitz_d1 || !link.third_bound || !link.concavity_on)
    throw Unsupported("glm_constants: link '" + link.name + "' does not declare its constants");
  if (domain_radius && (!(*domain_radius > 0) || !std::isfinite(*domain_radius)))
    throw InvalidArgument("glm_constants: domain radius must be positive");
  GlmConstants c;
  c.a_norm = model.data_spectral_norm();
  c.s2 = model.s2();
  c.s3 = model.s3();
  const double reach =
      domain_radius ? *domain_radius * model.max_data_norm() : std::numeric_limits<double>::infinity();
  c.k_link = link.concavity_on(reach);
  c.a_min = model.data_min_eigenvalue();
  c.k_N = *k0 + c.k_link * c.a_min;
  c.k_N_spectral = *k0 + c.k_link * c.a_norm;
  c.L_N = *l0 + *link.lipschitz_d1 * c.s2;
  c.M_N = *m0 + *link.third_bound * c.s3;
  return c;
}

nlohmann::json to_json(const BoundRecord& r) {
  nlohmann::json j;
  j["formula"] = r.formula;
  j["inputs"] = r.inputs;
  j["value"] = r.value ? nlohmann::json(*r.value) : nlohmann::json(nullptr);
  j["provenance"] = r.provenance;
  return j;
}

}  // namespace driftbound
