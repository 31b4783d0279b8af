#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "driftbound/bounds.hpp"
#include "driftbound/samplers.hpp"

using namespace driftbound;

TEST_CASE("step schedules") {
  StepSchedule s = StepSchedule::power(0.8, 0.5);
  CHECK(s.step(1) == 0.8);
  CHECK(s.step(4) == doctest::Approx(0.4));
  for (std::size_t i = 1; i < 100; ++i) {
    CHECK(s.step(i + 1) <= s.step(i));
    CHECK(s.step(i) > 0);
  }
  CHECK(StepSchedule::constant(0.1).step(1000) == 0.1);
  CHECK_THROWS_AS(StepSchedule::power(-1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(StepSchedule::power(0.1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(s.step(0), InvalidArgument);
}

TEST_CASE("project_ball") {
  Vector x(4);
  x << 4, 0, 0, 0;
  Vector p = project_ball(x, 3.0);
  CHECK(p == (Vector(4) << 3, 0, 0, 0).finished());
  Vector inside(2);
  inside << 0.5, -1.0;
  CHECK(project_ball(inside, 3.0) == inside);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Vector y = testutil::random_point(rng, 3, 5.0);
    Vector once = project_ball(y, 2.0);
    CHECK(project_ball(once, 2.0) == once);
    CHECK(once.norm() <= 2.0 + 1e-12);
  }
  CHECK_THROWS_AS(project_ball(x, 0.0), InvalidArgument);
}

TEST_CASE("ULA with zero drift is a Gaussian random walk") {
  const double g = 0.05;
  ChainTrace t = ula_chain(zero_drift(2), StepSchedule::constant(g), Vector::Zero(2), 50000, 3);
  REQUIRE(t.size() == 50001);
  Eigen::VectorXd inc(2 * 50000);
  for (std::size_t i = 0; i < 50000; ++i) {
    Vector d = t.states[i + 1] - t.states[i];
    inc[2 * i] = d[0];
    inc[2 * i + 1] = d[1];
  }
  const double n = static_cast<double>(inc.size());
  CHECK(std::abs(testutil::mean(inc)) < 4 * std::sqrt(2 * g / n));
  CHECK(std::abs(testutil::var(inc) - 2 * g) < 4 * 2 * g * std::sqrt(2 / n));
}

TEST_CASE("ULA on the OU drift matches the AR(1) stationary variance") {
  const double g = 0.1;
  const std::size_t steps = 100000;
  ChainTrace t = ula_chain(exact_drift(GaussianTarget::standard(1)), StepSchedule::constant(g), Vector::Zero(1),
                           steps, 4);
  const std::size_t burn = 1000;
  Eigen::VectorXd xs(static_cast<Eigen::Index>(steps - burn));
  for (std::size_t i = burn; i < steps; ++i) xs[static_cast<Eigen::Index>(i - burn)] = t.states[i + 1][0];
  const double target = 2 * g / (1 - (1 - g) * (1 - g));
  CHECK(target == doctest::Approx(1 / (1 - g / 2)));
  // Std. error of the sample variance of a Gaussian AR(1) with coefficient φ.
  const double phi = 1 - g, n = static_cast<double>(xs.size());
  const double se = std::sqrt(2 * target * target * (1 + phi * phi) / (1 - phi * phi) / n);
  CHECK(std::abs(testutil::var(xs) - target) < 3 * se);
}

TEST_CASE("ULA determinism, terminal agreement and recording stride") {
  DriftField f = exact_drift(std::make_shared<GaussianMixture2>((Vector(2) << 1.0, 0.5).finished()));
  StepSchedule s = StepSchedule::power(0.3, 0.5);
  Vector x0 = Vector::Constant(2, 1.0);
  ChainTrace a = ula_chain(f, s, x0, 500, 17), b = ula_chain(f, s, x0, 500, 17), c = ula_chain(f, s, x0, 500, 18);
  CHECK(a.states == b.states);
  CHECK(a.final_state() != c.final_state());
  CHECK(ula_terminal(f, s, x0, 500, 17) == a.final_state());
  UlaOptions sparse;
  sparse.record_stride = 100;
  ChainTrace d = ula_chain(f, s, x0, 500, 17, sparse);
  CHECK(d.size() == 6);
  CHECK(d.final_state() == a.final_state());
  sparse.record_stride = 0;
  CHECK(ula_chain(f, s, x0, 500, 17, sparse).size() == 2);
  a.validate();
  CHECK_THROWS_AS(ula_chain(f, s, x0, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(ula_chain(f, s, Vector::Zero(3), 5, 1), InvalidArgument);
}

TEST_CASE("ULA divergence names the step") {
  DriftField explode{1, [](ConstVecRef x, VecRef out) { out = 10.0 * x; }, std::nullopt, "explode"};
  try {
    ula_chain(explode, StepSchedule::constant(1.0), Vector::Ones(1), 1000, 1);
    FAIL("expected divergence");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("projected ULA stays in the ball") {
  DriftField explode{2, [](ConstVecRef x, VecRef out) { out = 10.0 * x; }, std::nullopt, "explode"};
  UlaOptions o;
  o.projection_radius = 3.0;
  ChainTrace t = ula_chain(explode, StepSchedule::constant(0.5), Vector::Ones(2), 200, 2, o);
  for (const auto& x : t.states) CHECK(x.norm() <= 3.0 + 1e-12);
}

TEST_CASE("Euler–Maruyama on the OU drift") {
  DriftField f = exact_drift(GaussianTarget::standard(1));
  SUBCASE("stationary variance") {
    const int reps = 10000;
    Eigen::VectorXd xs(reps);
    for (int r = 0; r < reps; ++r) xs[r] = euler_maruyama_terminal(f, 0.01, 6.0, Vector::Zero(1), derive_seed(5, r))[0];
    CHECK(std::abs(testutil::var(xs) - 1.0) < 0.05);
  }
  SUBCASE("mean decay from x0 = 5") {
    const int reps = 4000;
    Eigen::VectorXd xs(reps);
    for (int r = 0; r < reps; ++r) xs[r] = euler_maruyama_terminal(f, 1e-3, 1.0, Vector::Constant(1, 5.0), derive_seed(6, r))[0];
    const double sd = std::sqrt(1 - std::exp(-2.0));
    CHECK(std::abs(testutil::mean(xs) - 5 * std::exp(-1.0)) < 4 * sd / std::sqrt(double(reps)));
  }
  SUBCASE("trace and terminal agree in every dimension") {
    DriftField g = exact_drift(GaussianTarget::standard(3));
    ChainTrace t = euler_maruyama(g, 0.01, 2.0, Vector::Ones(3), 9, 10);
    CHECK(t.final_state() == euler_maruyama_terminal(g, 0.01, 2.0, Vector::Ones(3), 9));
    CHECK(t.times.back() == doctest::Approx(2.0));
    ChainTrace t1 = euler_maruyama(f, 0.01, 2.0, Vector::Ones(1), 9);
    CHECK(t1.final_state() == euler_maruyama_terminal(f, 0.01, 2.0, Vector::Ones(1), 9));
  }
  CHECK_THROWS_AS(euler_maruyama(f, 0.1, 0.05, Vector::Zero(1), 1), InvalidArgument);
  CHECK_THROWS_AS(euler_maruyama(f, -0.1, 1.0, Vector::Zero(1), 1), InvalidArgument);
  DriftField explode{1, [](ConstVecRef x, VecRef out) { out = 50.0 * x; }, std::nullopt, "explode"};
  CHECK_THROWS_AS(euler_maruyama_terminal(explode, 0.1, 100.0, Vector::Ones(1), 1), NumericalError);
}

TEST_CASE("joint stochastic diffusion") {
  auto gauss = GaussianTarget::standard(2);
  DriftField base = exact_drift(gauss);
  SUBCASE("a decoupled system reproduces Euler–Maruyama exactly") {
    StochasticDriftSpec s = ou_stochastic_drift(base, 1.0, 1.0);
    s.combine = [inner = base.fn](ConstVecRef x, ConstVecRef, VecRef out) { inner(x, out); };
    ChainTrace j = joint_stochastic_diffusion(s, 0.01, 3.0, Vector::Ones(2), Vector::Zero(2), 77, 0);
    CHECK(j.final_state() == euler_maruyama_terminal(base, 0.01, 3.0, Vector::Ones(2), 77));
    CHECK(j.aux.size() == j.states.size());
  }
  SUBCASE("stationary variances of the OU-augmented system") {
    // Var Y = v/α; Var X = 1 + v/(α(1+α)) from the stationary Lyapunov equation.
    const double alpha = 2.0, v = 1.0;
    DriftField b1 = exact_drift(GaussianTarget::standard(1));
    StochasticDriftSpec s = ou_stochastic_drift(b1, alpha, v);
    const int reps = 4000;
    Eigen::VectorXd xs(reps), ys(reps);
    for (int r = 0; r < reps; ++r) {
      ChainTrace t = joint_stochastic_diffusion(s, 0.005, 8.0, Vector::Zero(1), Vector::Zero(1), derive_seed(3, r), 0);
      xs[r] = t.final_state()[0];
      ys[r] = t.aux.back()[0];
    }
    const double se = std::sqrt(2.0 / reps);
    CHECK(std::abs(testutil::var(ys) / (v / alpha) - 1) < 4 * se + 0.01);
    CHECK(std::abs(testutil::var(xs) / (1 + v / (alpha * (1 + alpha))) - 1) < 4 * se + 0.01);
  }
  StochasticDriftSpec s = ou_stochastic_drift(base, 1.0, 1.0);
  CHECK_THROWS_AS(joint_stochastic_diffusion(s, 0.01, 1.0, Vector::Zero(2), Vector::Zero(3), 1), InvalidArgument);
}

TEST_CASE("ULA with the decreasing schedule gets closer to the target as T grows") {
  // Exact Gaussian drift from x0 = 3; compare W2 between the Gaussian fitted
  // to terminal states and N(0, 1), averaged over replications.
  DriftField f = exact_drift(GaussianTarget::standard(1));
  std::vector<double> dist;
  for (std::size_t T : {100, 1000, 10000}) {
    UlaSchedule sch = ula_step_schedule(1.0, 1.0, T, 0.5);
    const int reps = 2000;
    Eigen::VectorXd xs(reps);
    for (int r = 0; r < reps; ++r) xs[r] = ula_terminal(f, sch.schedule, Vector::Constant(1, 3.0), T, derive_seed(T, r))[0];
    const double m = testutil::mean(xs), s = std::sqrt(testutil::var(xs));
    dist.push_back(std::sqrt(m * m + (s - 1) * (s - 1)));
  }
  CHECK(dist[0] > dist[1]);
  CHECK(dist[1] > dist[2]);
}

TEST_CASE("binary and CSV trace export") {
  ChainTrace t = ula_chain(exact_drift(GaussianTarget::standard(2)), StepSchedule::constant(0.1), Vector::Ones(2), 30, 5);
  t.aux.assign(t.size(), Vector::Constant(2, -1.0));
  t.meta = {{"sampler", "ula"}};
  const auto dir = std::filesystem::temp_directory_path() / "driftbound_trace_test";
  std::filesystem::create_directories(dir);
  write_binary(t, dir / "t.bin");
  ChainTrace back = read_binary(dir / "t.bin");
  CHECK(back.times == t.times);
  CHECK(back.states == t.states);
  CHECK(back.aux == t.aux);
  CHECK(back.seed == t.seed);
  CHECK(back.meta == t.meta);
  write_csv(t, dir / "t.csv");
  SampleSet s = read_sample_csv(dir / "t.csv");
  CHECK(s.size() == static_cast<Eigen::Index>(t.size()));
  CHECK(s.dim() == 2);
  CHECK(s.points.row(7).transpose() == t.states[7]);
  CHECK_THROWS(read_binary(dir / "t.csv"));
  CHECK_THROWS_AS(read_binary(dir / "missing.bin"), ConfigError);
}

TEST_CASE("trace validation") {
  ChainTrace t;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.times = {0.0, 0.0};
  t.states = {Vector::Zero(1), Vector::Zero(1)};
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.times = {0.0, 1.0};
  t.validate();
  t.states[1][0] = std::nan("");
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}
