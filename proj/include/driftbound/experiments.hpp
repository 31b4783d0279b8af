#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "driftbound/config.hpp"
#include "driftbound/core.hpp"

namespace driftbound {

// Runs fn(0..n-1) on up to `threads` workers and returns results in index
// order. Each job must derive its randomness from its index, so the output
// does not depend on scheduling. The lowest-index exception is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

unsigned default_thread_count();

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json audit;

  void add_row(std::vector<std::string> row);
  std::size_t column_index(const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& column) const;
  // Parses a numeric cell; empty optional for "none".
  std::optional<double> number(std::size_t row, const std::string& column) const;
  void write_csv(const std::filesystem::path& path) const;
};

// Shortest round-trip decimal form, so tables are byte-stable across reruns.
std::string format_number(double x);

struct LogisticDataset {
  Matrix ys;                // N×4
  std::vector<int> labels;  // z_i
  std::uint64_t seed = 0;
};

/// z_i ~ Bernoulli(1/2), ζ_i ~ N(μ_{z_i}, I), y_i = (2z_i − 1)ζ_i with
/// μ₀ = (0,0,1,1) and μ₁ = (1,1,0,0).
LogisticDataset generate_logistic_data(std::size_t N, std::uint64_t seed);

struct Fig1aConfig {
  std::vector<double> deltas{0.25, 0.5, 1.0};
  std::vector<double> eps{0.05, 0.1, 0.25, 0.5};
  std::size_t samples = 1000;  // exact draws and diffusion replications per repeat
  std::size_t repeats = 10;
  double dt = 1e-3;
  std::optional<double> horizon;  // default 10/k (10 when uncertified)
  double x0 = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Columns: delta, eps, emp_w, emp_w_sd, bound, seed, reps.
ResultTable run_fig1a(const Fig1aConfig& cfg);

struct Fig1bConfig {
  std::vector<std::size_t> Ns{10, 30, 100, 300, 1000, 3000};
  std::size_t T = 20;
  double alpha = 0.5;
  std::size_t chains = 1000;  // terminal states per method and repeat
  std::size_t repeats = 10;
  std::size_t mh_iters = 100000;
  std::size_t reference_points = 1000;
  double radius = 3.0;
  // "local": k and L are the extreme eigenvalues of −H(x*);
  // "global": k_N and L_N on the radius ball.
  std::string schedule_constants = "local";
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Columns: N, method, steps, gamma1, step_condition, mean_w, sd_w,
/// budget_residual, seed, reps.
ResultTable run_fig1b(const Fig1bConfig& cfg);

struct ZzpCheckConfig {
  std::vector<double> eps{0.0, 0.1, 0.25, 0.5};
  std::size_t samples = 1000;  // path points per run
  double spacing = 5.0;
  double burn_in = 50.0;
  std::size_t repeats = 10;
  // Polynomial certificate for the bound column; none when absent.
  std::optional<double> cert_C, cert_alpha, cert_beta;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// 1-D unit Gaussian target against the rate of N(ε, 1).
/// Columns: eps, emp_w, emp_w_sd, exact_w, bound, seed, reps.
ResultTable run_zzp_check(const ZzpCheckConfig& cfg);

struct StochasticDriftConfig {
  std::size_t dim = 1;
  double alpha = 1.0;
  double v = 1.0;
  double dt = 1e-3;
  double horizon = 10.0;
  std::size_t samples = 1000;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Unit Gaussian with the OU-augmented drift b(x) + y.
/// Columns: alpha, v, emp_w, emp_w_sd, self_w, self_w_sd, ratio,
/// x_variance, stationary_x_variance, seed, reps.
ResultTable run_stochastic_drift_check(const StochasticDriftConfig& cfg);

// Config section → struct. Unknown keys are a ConfigError.
Fig1aConfig fig1a_config(const KeyValueConfig::Section& s);
Fig1bConfig fig1b_config(const KeyValueConfig::Section& s);
ZzpCheckConfig zzp_check_config(const KeyValueConfig::Section& s);
StochasticDriftConfig stochastic_drift_config(const KeyValueConfig::Section& s);

/// Dispatches by name (fig1a | fig1b | zzp_check | stochastic_drift_check)
/// using the matching config section plus `overrides` (same keys).
ResultTable run_experiment(const std::string& name, const KeyValueConfig& config,
                           const KeyValueConfig::Section& overrides);

}  // namespace driftbound
