#include "driftbound/targets.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "driftbound/config.hpp"

namespace driftbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log cosh(u), stable for large |u|.
double log_cosh(double u) {
  double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void TargetModel::sample_into(Rng&, VecRef) const {
  throw Unsupported("model '" + name() + "' has no exact sampler");
}

Vector TargetModel::grad_log_density(ConstVecRef x) const {
  require_dim(dim(), x.size(), "grad_log_density");
  require_finite(x, "grad_log_density");
  Vector out(x.size());
  grad_log_density_into(x, out);
  return out;
}

// ---------------------------------------------------------------- Gaussian

GaussianTarget::GaussianTarget(Vector mean, double variance) : mean_(std::move(mean)), variance_(variance) {
  require(mean_.size() > 0, "GaussianTarget: dimension must be positive");
  require(std::isfinite(variance_) && variance_ > 0, "GaussianTarget: variance must be positive");
  require_finite(mean_, "GaussianTarget mean");
}

std::shared_ptr<GaussianTarget> GaussianTarget::standard(std::size_t d) {
  return std::make_shared<GaussianTarget>(Vector::Zero(static_cast<Eigen::Index>(d)), 1.0);
}

double GaussianTarget::log_density(ConstVecRef x) const {
  return -(x - mean_).squaredNorm() / (2.0 * variance_);
}

void GaussianTarget::grad_log_density_into(ConstVecRef x, VecRef out) const {
  out = (mean_ - x) / variance_;
}

std::optional<Matrix> GaussianTarget::hessian(ConstVecRef) const {
  return Matrix(-Matrix::Identity(mean_.size(), mean_.size()) / variance_);
}

void GaussianTarget::sample_into(Rng& rng, VecRef out) const {
  fill_standard_normal(rng, out);
  out = mean_ + std::sqrt(variance_) * out;
}

// ----------------------------------------------------------------- Mixture

GaussianMixture2::GaussianMixture2(Vector delta) : delta_(std::move(delta)) {
  require(delta_.size() > 0, "GaussianMixture2: dimension must be positive");
  require_finite(delta_, "GaussianMixture2 delta");
}

double GaussianMixture2::log_density(ConstVecRef x) const {
  return -0.5 * x.squaredNorm() - delta_.squaredNorm() / 8.0 + log_cosh(0.5 * x.dot(delta_));
}

void GaussianMixture2::grad_log_density_into(ConstVecRef x, VecRef out) const {
  double th = std::tanh(0.5 * x.dot(delta_));
  out = -x + (0.5 * th) * delta_;
}

std::optional<Matrix> GaussianMixture2::hessian(ConstVecRef x) const {
  double c = std::cosh(0.5 * x.dot(delta_));
  double sech2 = 1.0 / (c * c);
  Matrix h = -Matrix::Identity(delta_.size(), delta_.size());
  h += (0.25 * sech2) * delta_ * delta_.transpose();
  return h;
}

std::optional<double> GaussianMixture2::concavity() const {
  double n = delta_.norm();
  if (n < 2.0) return 1.0 - n / 4.0;
  return std::nullopt;
}

std::optional<double> GaussianMixture2::lipschitz() const {
  // Hessian eigenvalues lie in [−1, −1 + ‖δ‖²/4].
  return std::max(1.0, delta_.squaredNorm() / 4.0 - 1.0);
}

void GaussianMixture2::sample_into(Rng& rng, VecRef out) const {
  bool upper = uniform01(rng) < 0.5;
  fill_standard_normal(rng, out);
  if (upper)
    out += 0.5 * delta_;
  else
    out -= 0.5 * delta_;
}

// ------------------------------------------------------------------- Links

ScalarLink logistic_link() {
  ScalarLink l;
  l.name = "logistic";
  l.value = [](double t) { return t >= 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); };
  l.d1 = [](double t) { return sigmoid(-t); };
  l.d2 = [](double t) { return -sigmoid(t) * sigmoid(-t); };
  l.d3 = [](double t) {
    double s = sigmoid(t);
    return -s * sigmoid(-t) * (1.0 - 2.0 * s);
  };
  l.lipschitz_d1 = 0.25;
  // max_s s(1−s)|1−2s| = 1/(6√3), attained at (1−2s)² = 1/3.
  l.third_bound = 1.0 / (6.0 * std::sqrt(3.0));
  l.concavity_on = [](double bound) {
    if (!std::isfinite(bound)) return 0.0;
    return sigmoid(bound) * sigmoid(-bound);
  };
  return l;
}

ScalarLink quadratic_link() {
  ScalarLink l;
  l.name = "quadratic";
  l.value = [](double t) { return -0.5 * t * t; };
  l.d1 = [](double t) { return -t; };
  l.d2 = [](double) { return -1.0; };
  l.d3 = [](double) { return 0.0; };
  l.lipschitz_d1 = 1.0;
  l.third_bound = 0.0;
  l.concavity_on = [](double) { return 1.0; };
  return l;
}

// -------------------------------------------------------------- GLM model

double spectral_norm_psd(const Matrix& a, double rel_tol, int max_iter) {
  require(a.rows() == a.cols(), "spectral_norm_psd: matrix must be square");
  if (a.rows() == 0 || a.isZero(0.0)) return 0.0;
  // Start from a vector with a component along every axis, so the dominant
  // eigenvector is not orthogonal to the initial guess in practice.
  Vector v(a.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = a * v;
    double next = v.dot(w);
    double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return std::max(next, wn);
    lambda = next;
  }
  return lambda;
}

GLMPosterior::GLMPosterior(TargetPtr prior, ScalarLink link, Matrix data)
    : prior_(std::move(prior)), link_(std::move(link)), data_(std::move(data)) {
  require(prior_ != nullptr, "GLMPosterior: prior is required");
  require(link_.value && link_.d1, "GLMPosterior: link needs value and first derivative");
  if (data_.rows() > 0) require_dim(prior_->dim(), data_.cols(), "GLMPosterior data");
  require(data_.allFinite(), "GLMPosterior: data must be finite");
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    double n = data_.row(i).norm();
    s2_ += n * n;
    s3_ += n * n * n;
    max_norm_ = std::max(max_norm_, n);
  }
  if (data_.rows() > 0) {
    const Matrix a = data_.transpose() * data_;
    a_norm_ = spectral_norm_psd(a);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
    a_min_ = std::max(0.0, eig.eigenvalues().minCoeff());
  }
}

double GLMPosterior::log_density(ConstVecRef x) const {
  double v = prior_->log_density(x);
  if (data_.rows() == 0) return v;
  Vector t = data_ * x;
  for (Eigen::Index i = 0; i < t.size(); ++i) v += link_.value(t[i]);
  return v;
}

void GLMPosterior::grad_log_density_into(ConstVecRef x, VecRef out) const {
  prior_->grad_log_density_into(x, out);
  if (data_.rows() == 0) return;
  Vector t = data_ * x;
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = link_.d1(t[i]);
  out.noalias() += data_.transpose() * t;
}

std::optional<Matrix> GLMPosterior::hessian(ConstVecRef x) const {
  auto h = prior_->hessian(x);
  if (!h || !link_.d2) return std::nullopt;
  if (data_.rows() == 0) return h;
  Vector t = data_ * x;
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = link_.d2(t[i]);
  *h += data_.transpose() * t.asDiagonal() * data_;
  return h;
}

std::optional<double> GLMPosterior::concavity() const {
  auto k0 = prior_->concavity();
  if (!k0 || !link_.concavity_on) return std::nullopt;
  return *k0 + link_.concavity_on(kInf) * a_min_;
}

std::optional<double> GLMPosterior::lipschitz() const {
  auto l0 = prior_->lipschitz();
  if (!l0 || !link_.lipschitz_d1) return std::nullopt;
  return *l0 + *link_.lipschitz_d1 * s2_;
}

// --------------------------------------------------------------- Operations

Vector grad_log_density(const TargetModel& model, ConstVecRef x) { return model.grad_log_density(x); }

std::optional<double> strong_concavity_constant(const TargetModel& model) { return model.concavity(); }

Vector find_mode(const TargetModel& model, ConstVecRef x0, const ModeOptions& opts) {
  require_dim(model.dim(), x0.size(), "find_mode");
  require_finite(x0, "find_mode");
  Vector x = x0;
  Vector g = model.grad_log_density(x);
  double f = model.log_density(x);
  double ascent_step = 1.0;

  for (int it = 0; it < opts.max_iter; ++it) {
    if (g.norm() <= opts.grad_tol) return x;

    Vector dir;
    bool newton = false;
    if (auto h = model.hessian(x)) {
      Eigen::LDLT<Matrix> ldlt(-*h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        dir = ldlt.solve(g);
        newton = dir.allFinite() && g.dot(dir) > 0;
      }
    }
    if (!newton) dir = g;

    double t = newton ? 1.0 : ascent_step;
    double slope = g.dot(dir);
    // Once the Armijo gain sinks below the resolution of f, a step within
    // rounding of f is accepted only if it shrinks the gradient.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector trial = x + t * dir;
      double ft = model.log_density(trial);
      const double gain = 1e-4 * t * slope;
      bool ok = std::isfinite(ft) && gain > slack && ft >= f + gain;
      Vector gt;
      if (!ok && gain <= slack && std::isfinite(ft) && ft >= f - slack) {
        gt = model.grad_log_density(trial);
        ok = gt.norm() < g.norm();
      }
      if (ok) {
        x = std::move(trial);
        f = ft;
        g = gt.size() ? std::move(gt) : model.grad_log_density(x);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    if (!newton) ascent_step = std::min(2.0 * t, 1e6);
  }
  if (g.norm() <= opts.grad_tol) return x;
  std::ostringstream msg;
  msg << "find_mode: no convergence within " << opts.max_iter << " iterations (final gradient norm " << g.norm()
      << ")";
  throw NumericalError(msg.str());
}

Vector find_mode(const GLMPosterior& model, const ModeOptions& opts) {
  return find_mode(static_cast<const TargetModel&>(model), Vector::Zero(static_cast<Eigen::Index>(model.dim())),
                   opts);
}

SampleSet sample_exact(const TargetModel& model, Eigen::Index n, std::uint64_t seed) {
  require(n >= 1, "sample_exact: n must be at least 1");
  if (!model.has_exact_sampler()) throw Unsupported("sample_exact: model '" + model.name() + "' has no exact sampler");
  Rng rng = make_rng(seed);
  SampleSet s{Matrix(n, static_cast<Eigen::Index>(model.dim())), "exact:" + model.name(), seed};
  Vector row(static_cast<Eigen::Index>(model.dim()));
  for (Eigen::Index i = 0; i < n; ++i) {
    model.sample_into(rng, row);
    s.points.row(i) = row.transpose();
  }
  return s;
}

TargetPtr make_target(const std::map<std::string, std::string>& params) {
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = params.find(k);
    return it == params.end() ? nullptr : &it->second;
  };
  const std::string* family = get("family");
  if (!family) throw ConfigError("make_target: missing 'family'");

  auto dim_or = [&](std::size_t fallback) {
    const std::string* d = get("dim");
    if (!d) return fallback;
    auto v = parse_int(*d, "dim");
    if (v < 1) throw ConfigError("make_target: dim must be positive");
    return static_cast<std::size_t>(v);
  };
  auto vec_of = [](const std::vector<double>& v) {
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };

  if (*family == "gaussian") {
    double sigma = get("sigma") ? parse_double(*get("sigma"), "sigma") : 1.0;
    if (!(sigma > 0)) throw ConfigError("make_target: sigma must be positive");
    Vector mean;
    if (const std::string* m = get("mean")) {
      mean = vec_of(parse_double_list(*m, "mean"));
      if (get("dim") && static_cast<std::size_t>(mean.size()) != dim_or(0))
        throw ConfigError("make_target: mean length does not match dim");
    } else {
      mean = Vector::Zero(static_cast<Eigen::Index>(dim_or(1)));
    }
    return std::make_shared<GaussianTarget>(std::move(mean), sigma * sigma);
  }
  if (*family == "mixture2") {
    const std::string* d = get("delta");
    if (!d) throw ConfigError("make_target: mixture2 needs 'delta'");
    std::vector<double> dv = parse_double_list(*d, "delta");
    std::size_t dim = dim_or(dv.size());
    // A scalar delta with dim > 1 means δ = (delta, 0, ..., 0).
    if (dv.size() == 1 && dim > 1) dv.resize(dim, 0.0);
    if (dv.size() != dim) throw ConfigError("make_target: delta length does not match dim");
    return std::make_shared<GaussianMixture2>(vec_of(dv));
  }
  if (*family == "glm_logistic") {
    const std::string* path = get("data");
    if (!path) throw ConfigError("make_target: glm_logistic needs 'data'");
    SampleSet ys = read_sample_csv(*path, "glm-data");
    double ps = get("prior_sigma") ? parse_double(*get("prior_sigma"), "prior_sigma") : 1.0;
    if (!(ps > 0)) throw ConfigError("make_target: prior_sigma must be positive");
    auto prior = std::make_shared<GaussianTarget>(Vector::Zero(ys.dim()), ps * ps);
    return std::make_shared<GLMPosterior>(prior, logistic_link(), ys.points);
  }
  throw ConfigError("make_target: unknown family '" + *family + "'");
}

}  // namespace driftbound
