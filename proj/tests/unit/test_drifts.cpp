#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "driftbound/drifts.hpp"

using namespace driftbound;

TEST_CASE("exact drift") {
  DriftField f = exact_drift(GaussianTarget::standard(3));
  Vector x(3);
  x << 1.0, -2.0, 0.25;
  CHECK(f(x) == -x);
  CHECK(f.lipschitz.value() == 1.0);
  DriftField m = exact_drift(std::make_shared<GaussianMixture2>(Vector::Constant(1, 1.0)));
  CHECK(m(Vector::Zero(1))[0] == doctest::Approx(0.0));
  auto glm = testutil::small_logistic_model(40, 2);
  DriftField g = exact_drift(glm);
  CHECK(g(find_mode(*glm)).norm() <= 1e-9);
  CHECK_THROWS_AS(g(Vector::Zero(2)), InvalidArgument);
}

TEST_CASE("offset drift") {
  auto gauss = GaussianTarget::standard(1);
  DriftField base = exact_drift(gauss);
  DriftField same = offset_drift(base, Vector::Zero(1));
  DriftField shifted = offset_drift(base, Vector::Constant(1, 0.25));
  for (double x : {-3.0, 0.0, 1.5}) {
    Vector v = Vector::Constant(1, x);
    CHECK(same(v)[0] == base(v)[0]);
    CHECK(shifted(v)[0] == doctest::Approx(-x + 0.25));
  }
  SUBCASE("a mean shift of a Gaussian is a constant offset") {
    Vector mu(2), mu2(2);
    mu << 0.5, -1.0;
    mu2 << 1.5, 0.0;
    const double var = 2.0;
    auto a = std::make_shared<GaussianTarget>(mu, var);
    auto b = std::make_shared<GaussianTarget>(mu2, var);
    DriftField fa = offset_drift(exact_drift(a), (mu2 - mu) / var);
    DriftField fb = exact_drift(b);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
      Vector x = testutil::random_point(rng, 2, 3.0);
      CHECK((fa(x) - fb(x)).norm() < 1e-14);
    }
  }
  CHECK_THROWS_AS(offset_drift(base, Vector::Zero(2)), InvalidArgument);
}

TEST_CASE("offset invariance of the sup error") {
  auto gauss = GaussianTarget::standard(3);
  DriftField base = exact_drift(gauss);
  Vector e(3);
  e << 0.1, -0.2, 0.05;
  DriftField shifted = offset_drift(base, e);
  for (std::uint64_t seed : {1, 2, 3}) {
    SampleSet probe = gaussian_probe_cloud(Vector::Zero(3), 1.0 + static_cast<double>(seed), 50, seed);
    CHECK(drift_error_sup(shifted, base, probe) == doctest::Approx(e.norm()).epsilon(1e-13));
  }
  SampleSet probe = gaussian_probe_cloud(Vector::Zero(3), 1.0, 10, 4);
  CHECK(drift_error_sup(base, base, probe) == 0.0);
  DriftField one = offset_drift(exact_drift(GaussianTarget::standard(1)), Vector::Constant(1, 0.1));
  CHECK(drift_error_sup(one, exact_drift(GaussianTarget::standard(1)), gaussian_probe_cloud(Vector::Zero(1), 2, 30, 5)) ==
        doctest::Approx(0.1));
  SampleSet empty{Matrix(0, 3), "empty", 0};
  CHECK_THROWS_AS(drift_error_sup(base, base, empty), InvalidArgument);
}

TEST_CASE("Taylor drift") {
  SUBCASE("Gaussian prior with no data reproduces the exact drift") {
    auto m = std::make_shared<GLMPosterior>(GaussianTarget::standard(4), logistic_link(), Matrix(0, 4));
    DriftField t = taylor2_drift(m);
    DriftField e = exact_drift(m);
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      Vector x = testutil::random_point(rng, 4, 2.0);
      CHECK((t(x) - e(x)).norm() < 1e-12);
      CHECK((t(x) + x).norm() < 1e-12);
    }
  }
  SUBCASE("quadratic links have no remainder") {
    auto data = testutil::small_logistic_model(8, 3)->data();
    auto m = std::make_shared<GLMPosterior>(GaussianTarget::standard(4), quadratic_link(), data);
    DriftField t = taylor2_drift(m, find_mode(*m));
    DriftField e = exact_drift(m);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      Vector x = testutil::random_point(rng, 4, 3.0);
      CHECK((t(x) - e(x)).norm() < 1e-10 * std::max(1.0, e(x).norm()));
    }
  }
  SUBCASE("logistic remainder stays within the coordinate-wise bound") {
    auto m = testutil::small_logistic_model(60, 4);
    Vector xs = find_mode(*m);
    DriftField t = taylor2_drift(m, xs);
    DriftField e = exact_drift(m);
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      Vector x = xs + testutil::random_point(rng, 4, 0.5);
      CHECK((t(x) - e(x)).norm() <= taylor_remainder_bound(*m, xs, x));
    }
    SampleSet probe = gaussian_probe_cloud(xs, 0.05, 100, 7);
    double rmax = 0;
    for (Eigen::Index i = 0; i < probe.size(); ++i)
      rmax = std::max(rmax, (probe.points.row(i).transpose() - xs).norm());
    Vector far = xs;
    far[0] += rmax;
    CHECK(drift_error_sup(t, e, probe) <= taylor_remainder_bound(*m, xs, far));
  }
  SUBCASE("linearity in x − x*") {
    auto m = testutil::small_logistic_model(20, 5);
    Vector xs = find_mode(*m);
    DriftField t = taylor2_drift(m, xs);
    CHECK(t(xs).norm() == 0.0);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      Vector u = testutil::random_point(rng, 4, 1.0);
      CHECK((t(xs + 2 * u) - 2 * t(xs + u)).norm() < 1e-11 * std::max(1.0, t(xs + u).norm()));
    }
  }
  SUBCASE("shares the strong-concavity constant of the exact drift") {
    auto m = testutil::small_logistic_model(30, 6);
    DriftField t = taylor2_drift(m);
    const double k = *m->concavity();
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) {
      Vector x = testutil::random_point(rng, 4, 2.0), y = testutil::random_point(rng, 4, 2.0);
      CHECK((t(x) - t(y)).dot(x - y) <= -k * (x - y).squaredNorm() + 1e-12);
    }
  }
  SUBCASE("a link without second derivatives is rejected") {
    ScalarLink l = logistic_link();
    l.d2 = nullptr;
    auto m = std::make_shared<GLMPosterior>(GaussianTarget::standard(4), l, Matrix::Ones(2, 4));
    CHECK_THROWS_AS(taylor2_drift(m, Vector::Zero(4)), Unsupported);
  }
}

TEST_CASE("tail-regularized drift") {
  const double eps = 0.4, R = 2.0;
  auto gauss = GaussianTarget::standard(3);
  DriftField ref = exact_drift(gauss);
  Vector e(3);
  e << 0.1, 0.1, -0.1;  // ‖e‖ < ε/2
  DriftField approx = offset_drift(ref, e);
  DriftField reg = tail_regularized_drift(approx, eps, R);
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    Vector x = testutil::random_point(rng, 3, 1.5);
    const double n = x.norm();
    if (n < R / 2) CHECK((reg(x) - approx(x)).norm() == 0.0);
    if (n >= R) {
      Vector added = reg(x) - approx(x);
      CHECK(added.norm() == doctest::Approx(eps / 2).epsilon(1e-12));
      CHECK((added + eps * x / (2 * n)).norm() < 1e-12);
      CHECK(x.dot(ref(x) - reg(x)) >= 0.0);
    }
    CHECK((ref(x) - reg(x)).norm() <= eps + 1e-12);
  }
  SUBCASE("the tilt is ε/R-Lipschitz") {
    for (int i = 0; i < 2000; ++i) {
      Vector x = testutil::random_point(rng, 3, 1.5), y = x + 0.01 * testutil::random_point(rng, 3, 1.0);
      CHECK((tail_tilt(x, eps, R) - tail_tilt(y, eps, R)).norm() <= eps / R * (x - y).norm() * (1 + 1e-9));
    }
    CHECK(reg.lipschitz.value() == doctest::Approx(1.0 + eps / R));
  }
  CHECK_THROWS_AS(tail_regularized_drift(approx, 0.0, R), InvalidArgument);
  CHECK_THROWS_AS(tail_regularized_drift(approx, eps, -1.0), InvalidArgument);
}

TEST_CASE("OU stochastic drift") {
  DriftField base = exact_drift(GaussianTarget::standard(2));
  StochasticDriftSpec s = ou_stochastic_drift(base, 1.0, 1.0);
  CHECK(s.aux_dim == 2);
  CHECK(s.aux_noise.isApprox(std::sqrt(2.0) * Matrix::Identity(2, 2)));
  Vector x(2), y(2), out(2), y_out(2);
  x << 0.3, -1.2;
  y << 0.7, 0.1;
  s.combine(x, Vector::Zero(2), out);
  CHECK(out == base(x));
  s.aux_drift(y, y_out);
  CHECK(y_out == -y);
  SUBCASE("stationary aux variance v/α and zero conditional bias") {
    StochasticDriftSpec t = ou_stochastic_drift(base, 2.0, 3.0);
    const double sd = std::sqrt(3.0 / 2.0);
    CHECK(t.aux_noise(0, 0) * t.aux_noise(0, 0) / (2 * 2.0) == doctest::Approx(sd * sd));
    Rng rng(9);
    Vector acc = Vector::Zero(2);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      Vector yy = sd * standard_normal(rng, 2);
      t.combine(x, yy, out);
      acc += out;
    }
    acc /= n;
    CHECK((acc - base(x)).norm() < 4 * sd * std::sqrt(2.0 / n));
  }
  CHECK_THROWS_AS(ou_stochastic_drift(base, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ou_stochastic_drift(base, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("drift records") {
  DriftRecord r{"tail_regularized", {{"eps", "0.5"}, {"radius", "3"}}};
  DriftRecord back = drift_record_from_json(to_json(r));
  CHECK(back.kind == r.kind);
  CHECK(back.params == r.params);
  auto model = GaussianTarget::standard(2);
  DriftField f = make_drift(back, model);
  Vector far = Vector::Constant(2, 10.0);
  CHECK((f(far) - (-far - 0.25 * far / far.norm())).norm() < 1e-12);
  CHECK(make_drift({"offset", {{"eps", "0.1,0.2"}}}, model)(Vector::Zero(2))[1] == doctest::Approx(0.2));
  CHECK_THROWS_AS(make_drift({"offset", {{"eps", "0.1"}}}, model), ConfigError);
  CHECK_THROWS_AS(make_drift({"taylor2", {}}, model), ConfigError);
  CHECK_THROWS_AS(make_drift({"mystery", {}}, model), ConfigError);
  CHECK_THROWS_AS(make_drift({"tail_regularized", {{"eps", "1"}}}, model), ConfigError);
  CHECK_THROWS_AS(drift_record_from_json(nlohmann::json::object()), ConfigError);
}
