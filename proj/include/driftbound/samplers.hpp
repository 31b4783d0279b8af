#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "driftbound/core.hpp"
#include "driftbound/drifts.hpp"
#include "driftbound/rng.hpp"
#include "driftbound/sample_set.hpp"
#include "driftbound/targets.hpp"

namespace driftbound {

// γ_i = γ₁ i^{−α}, i ≥ 1. α = 0 gives a constant step.
struct StepSchedule {
  double gamma1 = 0.0;
  double alpha = 0.0;

  static StepSchedule constant(double gamma);
  static StepSchedule power(double gamma1, double alpha);

  double step(std::size_t i) const;
  void validate() const;
};

// Seeded trajectory. `aux` holds the velocity (zig-zag), momentum (HMC) or
// auxiliary-process state (stochastic drift) recorded alongside each state;
// it is empty for plain diffusions and chains.
struct ChainTrace {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> aux;
  std::uint64_t seed = 0;
  nlohmann::json meta;

  std::size_t size() const { return states.size(); }
  const Vector& final_state() const { return states.back(); }
  /// Throws InvalidArgument unless times strictly increase, every state is
  /// finite and the trace is nonempty.
  void validate() const;
  SampleSet as_sample_set(std::string label = {}) const;
};

// CSV: "time,x0..x{d-1}[,v0..v{d-1}]", one row per recorded state.
void write_csv(const ChainTrace& trace, const std::filesystem::path& path);
// Compact little-endian dump for reruns; see trace_io in samplers.cpp for
// the layout. read_binary(write_binary(t)) reproduces t bit for bit.
void write_binary(const ChainTrace& trace, const std::filesystem::path& path);
ChainTrace read_binary(const std::filesystem::path& path);

// Divergence guard shared by all samplers.
inline constexpr double kDivergenceNorm = 1e8;

// record_stride: keep every k-th step (initial and final states are always
// kept); 0 keeps only the endpoints.
struct UlaOptions {
  std::optional<double> projection_radius;
  std::size_t record_stride = 1;
};

/// X_{i+1} = X_i + γ_{i+1} b(X_i) + √(2γ_{i+1}) ξ_{i+1}; with a projection
/// radius the post-noise iterate is projected onto the ball each step.
ChainTrace ula_chain(const DriftField& drift, const StepSchedule& schedule, const Vector& x0, std::size_t steps,
                     std::uint64_t seed, const UlaOptions& opts = {});

/// Final state only; same stream as ula_chain with the same seed.
Vector ula_terminal(const DriftField& drift, const StepSchedule& schedule, const Vector& x0, std::size_t steps,
                    std::uint64_t seed, const UlaOptions& opts = {});

Vector project_ball(const Vector& x, double radius);

/// Fixed-step Euler–Maruyama for dX = b(X) dt + √2 dW over floor(t_end/dt) steps.
ChainTrace euler_maruyama(const DriftField& drift, double dt, double t_end, const Vector& x0, std::uint64_t seed,
                          std::size_t record_stride = 1);
Vector euler_maruyama_terminal(const DriftField& drift, double dt, double t_end, const Vector& x0,
                               std::uint64_t seed);

/// Coupled (X, Y) system of a StochasticDriftSpec. X and Y draw from
/// independent streams; the X stream is the one euler_maruyama uses for
/// the same seed. `aux` in the trace holds Y.
ChainTrace joint_stochastic_diffusion(const StochasticDriftSpec& spec, double dt, double t_end, const Vector& x0,
                                      const Vector& y0, std::uint64_t seed, std::size_t record_stride = 1);

// ------------------------------------------------------------- zig-zag

struct ZZPState {
  Vector x;
  Vector theta;  // entries ±1

  void validate() const;
};

/// γ(x, θ) ≥ 0 componentwise, with γ_i(x, θ) = γ_i(x, R_iθ).
using RefreshFn = std::function<Vector(const Vector& x, const Vector& theta)>;
RefreshFn constant_refresh(std::size_t d, double gamma);

/// λ_i(x, θ) = (−θ_i ∂_i log π(x))⁺ + γ_i(x, θ).
Vector zzp_rate(const TargetModel& model, const RefreshFn& refresh, const ZZPState& s);

struct ZzpOptions {
  // Lipschitz constant of ∇log π for the thinning envelope; defaults to
  // model.lipschitz().
  std::optional<double> lipschitz;
};

/// Exact-in-law zig-zag simulation by Poisson thinning. Each coordinate
/// proposes from the affine envelope λ_i(x, θ) + L√d·s, rebuilt after every
/// proposal. The trace records the initial state, every accepted flip and
/// the state at t_end; `aux` holds θ. Throws NumericalError if a true rate
/// ever exceeds its envelope (the Lipschitz constant is wrong).
ChainTrace zzp_simulate(const TargetModel& model, const RefreshFn& refresh, const ZZPState& s0, double t_end,
                        std::uint64_t seed, const ZzpOptions& opts = {});

// Time averages over a piecewise-linear zig-zag trace, computed exactly per
// segment.
struct ZzpTimeAverages {
  Vector mean;
  Vector variance;
  Vector theta_plus_fraction;
  double horizon = 0.0;
};
ZzpTimeAverages zzp_time_averages(const ChainTrace& trace);

/// Positions at times t0, t0 + spacing, ... ≤ trace end, by linear
/// interpolation of the zig-zag path.
SampleSet zzp_sample_path(const ChainTrace& trace, double t0, double spacing, std::string label = {});

// ------------------------------------------------------ idealized HMC

struct HmcState {
  Vector x;
  Vector p;
};

/// Leapfrog integration of dX = M⁻¹P dt, dP = ∇log π(X) dt over `duration`
/// in steps of `dt` (the last step is shortened to land exactly).
HmcState leapfrog_flow(const TargetModel& model, const Matrix& mass_inverse, HmcState s, double duration,
                       double dt);

/// Idealized HMC as a PDMP: Hamiltonian flow between Exp(λ) epochs, with
/// the momentum redrawn from N(0, M) at each epoch. dt_flow defaults to
/// min(0.01, 0.1/λ). The trace records the state at every epoch (momentum
/// after the refresh) and the state at t_end.
ChainTrace hmc_pdmp_simulate(const TargetModel& model, double lambda_refresh, const Matrix& mass, const HmcState& s0,
                             double t_end, std::uint64_t seed, std::optional<double> dt_flow = std::nullopt);

// ----------------------------------------------------- adaptive MH

struct MhOptions {
  std::optional<Vector> x0;           // default: origin
  std::optional<Matrix> initial_cov;  // default: identity
  double burn_in_fraction = 0.2;
  double target_acceptance = 0.234;
  std::optional<double> domain_radius;  // density is zero outside the ball
  std::size_t zero_accept_window = 5000;
};

struct MhResult {
  SampleSet samples;  // post burn-in
  double acceptance_rate = 0.0;  // post burn-in
  Matrix proposal_cov;
  std::size_t burn_in = 0;
};

/// Random-walk Metropolis; during burn-in the proposal covariance tracks
/// the empirical state covariance (Haario) and a global scale is tuned by
/// Robbins–Monro towards the target acceptance. Both are frozen after
/// burn-in. Throws NumericalError after a window with zero acceptances.
MhResult adaptive_mh(const TargetModel& model, std::size_t iters, std::uint64_t seed, const MhOptions& opts = {});

}  // namespace driftbound
