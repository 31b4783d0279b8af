#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"

#include "driftbound/bounds.hpp"
#include "driftbound/experiments.hpp"

using namespace driftbound;

TEST_CASE("parallel_map keeps index order and rethrows the lowest-index failure") {
  for (unsigned threads : {1u, 3u, 8u}) {
    auto out = parallel_map(100, threads, [](std::size_t i) { return i * i; });
    REQUIRE(out.size() == 100);
    for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == i * i);
    try {
      parallel_map(50, threads, [](std::size_t i) -> int {
        if (i == 17 || i == 33) throw std::runtime_error("job " + std::to_string(i));
        return 0;
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "job 17");
    }
  }
  CHECK(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(-1.5e-300) == "-1.5e-300");
  CHECK(format_number(std::nan("")) == "nan");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, std::floor(20 * uniform01(rng)) - 10);
    CHECK(std::stod(format_number(x)) == x);
  }
}

TEST_CASE("result tables") {
  ResultTable t;
  t.columns = {"a", "b"};
  t.add_row({"1", "none"});
  t.add_row({"2.5", "3"});
  CHECK(t.number(1, "a") == 2.5);
  CHECK_FALSE(t.number(0, "b").has_value());
  CHECK_THROWS_AS(t.add_row({"1"}), InvalidArgument);
  CHECK_THROWS_AS(t.cell(0, "c"), InvalidArgument);
  CHECK_THROWS_AS(t.cell(5, "a"), InvalidArgument);
  const auto p = std::filesystem::temp_directory_path() / "driftbound_table.csv";
  t.write_csv(p);
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n1,none\n2.5,3\n");
}

TEST_CASE("logistic data generator") {
  LogisticDataset ds = generate_logistic_data(40000, 3);
  REQUIRE(ds.ys.rows() == 40000);
  REQUIRE(ds.ys.cols() == 4);
  const Eigen::Vector4d mu0(0, 0, 1, 1), mu1(1, 1, 0, 0);
  Eigen::Vector4d s0 = Eigen::Vector4d::Zero(), s1 = Eigen::Vector4d::Zero();
  double n1 = 0;
  for (Eigen::Index i = 0; i < ds.ys.rows(); ++i) {
    if (ds.labels[static_cast<std::size_t>(i)]) {
      s1 += ds.ys.row(i).transpose();
      ++n1;
    } else {
      s0 += ds.ys.row(i).transpose();
    }
  }
  const double n0 = 40000 - n1;
  CHECK(std::abs(n1 / 40000 - 0.5) < 0.01);
  // y = ζ with mean μ₁ when z = 1, and y = −ζ with mean −μ₀ when z = 0.
  CHECK((s1 / n1 - mu1).cwiseAbs().maxCoeff() < 0.03);
  CHECK((s0 / n0 + mu0).cwiseAbs().maxCoeff() < 0.03);
  LogisticDataset again = generate_logistic_data(40000, 3);
  CHECK(again.ys == ds.ys);
  CHECK(again.labels == ds.labels);
  CHECK(generate_logistic_data(10, 4).ys != generate_logistic_data(10, 5).ys);
  CHECK_THROWS_AS(generate_logistic_data(0, 1), InvalidArgument);
}

TEST_CASE("fig1a table") {
  Fig1aConfig c;
  c.deltas = {0.5, 1.0};
  c.eps = {0.0, 0.25};
  c.samples = 200;
  c.repeats = 3;
  c.dt = 0.01;
  c.horizon = 4.0;
  c.seed = 11;
  c.threads = 2;
  ResultTable t = run_fig1a(c);
  CHECK(t.columns == std::vector<std::string>{"delta", "eps", "emp_w", "emp_w_sd", "bound", "seed", "reps"});
  REQUIRE(t.rows.size() == 4);
  CHECK(*t.number(0, "delta") == 0.5);
  CHECK(*t.number(0, "bound") == 0.0);
  CHECK(*t.number(1, "bound") == doctest::Approx(0.25 / 0.875).epsilon(1e-14));
  CHECK(*t.number(3, "bound") == doctest::Approx(0.25 / 0.75).epsilon(1e-14));
  CHECK(t.cell(2, "reps") == "3");
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(*t.number(r, "emp_w") > 0);
    CHECK(*t.number(r, "emp_w_sd") >= 0);
  }
  CHECK(t.audit["cells"].size() == 4);
  CHECK(t.audit["cells"][1]["bound"]["provenance"] == "strong-concavity");
  c.threads = 1;
  CHECK(run_fig1a(c).rows == t.rows);
  c.seed = 12;
  CHECK(run_fig1a(c).rows != t.rows);
}

TEST_CASE("fig1b table") {
  Fig1bConfig c;
  c.Ns = {10, 30};
  c.T = 8;
  c.chains = 40;
  c.repeats = 2;
  c.mh_iters = 5000;
  c.reference_points = 40;
  c.seed = 5;
  c.threads = 2;
  ResultTable t = run_fig1b(c);
  REQUIRE(t.rows.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    const double N = *t.number(r, "N");
    const double steps = *t.number(r, "steps");
    if (t.cell(r, "method") == "ULA") {
      CHECK(steps == 8);
    } else {
      CHECK(t.cell(r, "method") == "AGULA");
      CHECK(steps == static_cast<double>(matched_budget_steps(static_cast<std::size_t>(N), 8, 4)));
      // T·N = (T̃ + N)·d + residual.
      CHECK(8 * N == (steps + N) * 4 + *t.number(r, "budget_residual"));
    }
    CHECK(*t.number(r, "mean_w") > 0);
    CHECK(*t.number(r, "gamma1") > 0);
    const std::string cond = t.cell(r, "step_condition");
    CHECK((cond == "ok" || cond == "violated"));
  }
  CHECK(t.audit["datasets"].size() == 2);
  CHECK(t.audit["datasets"][0]["mh"]["acceptance"].get<double>() > 0.05);
  c.threads = 1;
  CHECK(run_fig1b(c).rows == t.rows);
  c.schedule_constants = "bogus";
  CHECK_THROWS_AS(run_fig1b(c), ConfigError);
}

TEST_CASE("zig-zag check table") {
  ZzpCheckConfig c;
  c.eps = {0.0, 0.5};
  c.samples = 100;
  c.spacing = 2.0;
  c.burn_in = 5.0;
  c.repeats = 2;
  c.cert_C = 2.0;
  c.cert_alpha = 2.0;
  c.cert_beta = 1.0;
  c.seed = 3;
  ResultTable t = run_zzp_check(c);
  REQUIRE(t.rows.size() == 2);
  CHECK(*t.number(1, "exact_w") == 0.5);
  CHECK(*t.number(1, "bound") == doctest::Approx(1.0));
  CHECK(*t.number(0, "bound") == 0.0);
  CHECK(*t.number(1, "emp_w") > *t.number(0, "emp_w"));
  c.cert_C.reset();
  CHECK(run_zzp_check(c).cell(0, "bound") == "none");
}

TEST_CASE("stochastic drift table") {
  StochasticDriftConfig c;
  c.samples = 100;
  c.repeats = 2;
  c.dt = 0.01;
  c.horizon = 3.0;
  c.seed = 2;
  ResultTable t = run_stochastic_drift_check(c);
  REQUIRE(t.rows.size() == 1);
  CHECK(*t.number(0, "stationary_x_variance") == doctest::Approx(1.5));
  CHECK(*t.number(0, "ratio") == doctest::Approx(*t.number(0, "emp_w") / *t.number(0, "self_w")));
  CHECK(t.audit["bound"]["value"] == 0.0);
  CHECK(t.audit["marginal_x_w1_gaussian"].get<double>() ==
        doctest::Approx(std::sqrt(2 / std::numbers::pi) * (std::sqrt(1.5) - 1)));
}

TEST_CASE("experiment configs") {
  KeyValueConfig cfg = KeyValueConfig::parse(
      "[fig1a]\ndeltas = 0.5\neps = 0.1, 0.2\nsamples = 50\nreps = 2\ndt = 0.02\nhorizon = 2\nseed = 9\n"
      "[fig1b]\nN = 10\nT = 12\nschedule_constants = global\n"
      "[zzp_check]\neps = 0.1\ncert_C = 1\ncert_alpha = 2\ncert_beta = 1\n"
      "[stochastic_drift_check]\nalpha = 2\nv = 0.5\n");
  Fig1aConfig a = fig1a_config(cfg.section("fig1a"));
  CHECK(a.eps == std::vector<double>{0.1, 0.2});
  CHECK(a.samples == 50);
  CHECK(*a.horizon == 2.0);
  CHECK(a.seed == 9);
  Fig1bConfig b = fig1b_config(cfg.section("fig1b"));
  CHECK(b.Ns == std::vector<std::size_t>{10});
  CHECK(b.T == 12);
  CHECK(b.schedule_constants == "global");
  CHECK(zzp_check_config(cfg.section("zzp_check")).cert_beta == 1.0);
  CHECK(stochastic_drift_config(cfg.section("stochastic_drift_check")).alpha == 2.0);

  ResultTable t = run_experiment("fig1a", cfg, {{"reps", "1"}, {"samples", "20"}});
  CHECK(t.rows.size() == 2);
  CHECK(t.cell(0, "reps") == "1");

  CHECK_THROWS_AS(fig1a_config({{"detla", "1"}}), ConfigError);
  CHECK_THROWS_AS(fig1a_config({{"dt", "0"}}), ConfigError);
  CHECK_THROWS_AS(fig1a_config({{"samples", "-3"}}), ConfigError);
  CHECK_THROWS_AS(fig1b_config({{"T", "4"}}), ConfigError);
  CHECK_THROWS_AS(fig1b_config({{"N", "0"}}), ConfigError);
  CHECK_THROWS_AS(zzp_check_config({{"cert_C", "1"}}), ConfigError);
  CHECK_THROWS_AS(stochastic_drift_config({{"alpha", "0"}}), ConfigError);
  CHECK_THROWS_AS(stochastic_drift_config({{"seed", "x"}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("fig9", cfg, {}), ConfigError);
}
