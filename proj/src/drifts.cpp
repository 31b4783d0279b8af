#include "driftbound/drifts.hpp"

#include <cmath>
#include <sstream>

#include "driftbound/config.hpp"
#include "driftbound/rng.hpp"

namespace driftbound {

Vector DriftField::operator()(ConstVecRef x) const {
  require_dim(dim, x.size(), label.c_str());
  Vector out(x.size());
  fn(x, out);
  return out;
}

DriftField exact_drift(TargetPtr model) {
  require(model != nullptr, "exact_drift: null model");
  DriftField f;
  f.dim = model->dim();
  f.lipschitz = model->lipschitz();
  f.label = "exact:" + model->name();
  f.fn = [m = std::move(model)](ConstVecRef x, VecRef out) { m->grad_log_density_into(x, out); };
  return f;
}

DriftField zero_drift(std::size_t d) {
  return DriftField{d, [](ConstVecRef, VecRef out) { out.setZero(); }, 0.0, "zero"};
}

DriftField offset_drift(const DriftField& field, const Vector& eps) {
  require_dim(field.dim, eps.size(), "offset_drift eps");
  require_finite(eps, "offset_drift eps");
  DriftField f;
  f.dim = field.dim;
  f.lipschitz = field.lipschitz;
  std::ostringstream lbl;
  lbl << field.label << "+offset(" << eps.norm() << ")";
  f.label = lbl.str();
  f.fn = [inner = field.fn, eps](ConstVecRef x, VecRef out) {
    inner(x, out);
    out += eps;
  };
  return f;
}

DriftField taylor2_drift(std::shared_ptr<const GLMPosterior> model, const Vector& x_star) {
  require(model != nullptr, "taylor2_drift: null model");
  require_dim(model->dim(), x_star.size(), "taylor2_drift expansion point");
  require_finite(x_star, "taylor2_drift expansion point");
  if (!model->link().d2) throw Unsupported("taylor2_drift: link '" + model->link().name + "' lacks φ''");
  auto h = model->hessian(x_star);
  if (!h) throw Unsupported("taylor2_drift: prior Hessian unavailable");

  DriftField f;
  f.dim = model->dim();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(*h, Eigen::EigenvaluesOnly);
  f.lipschitz = eig.eigenvalues().cwiseAbs().maxCoeff();
  f.label = "taylor2:" + model->name();
  f.fn = [hm = std::move(*h), x_star](ConstVecRef x, VecRef out) { out.noalias() = hm * (x - x_star); };
  return f;
}

DriftField taylor2_drift(std::shared_ptr<const GLMPosterior> model) {
  Vector mode = find_mode(*model);
  return taylor2_drift(std::move(model), mode);
}

double taylor_remainder_bound(const GLMPosterior& model, const Vector& x_star, const Vector& x) {
  auto m0 = model.prior().hessian_lipschitz();
  auto mphi = model.link().third_bound;
  if (!m0 || !mphi) throw Unsupported("taylor_remainder_bound: third-derivative constants unavailable");
  double r = (x - x_star).squaredNorm();
  return std::sqrt(static_cast<double>(model.dim())) * r * (*m0 + *mphi * model.s3());
}

Vector tail_tilt(const Vector& x, double eps, double radius) {
  double n = x.norm();
  if (n < 0.5 * radius) return Vector::Zero(x.size());
  double ramp = n < radius ? 2.0 * n / radius - 1.0 : 1.0;
  return (-0.5 * eps * ramp / n) * x;
}

DriftField tail_regularized_drift(const DriftField& field, double eps, double radius) {
  require(std::isfinite(eps) && eps > 0, "tail_regularized_drift: eps must be positive");
  require(std::isfinite(radius) && radius > 0, "tail_regularized_drift: radius must be positive");
  DriftField f;
  f.dim = field.dim;
  // The tilt's Jacobian has radial eigenvalue ε/R on the ramp and
  // tangential eigenvalues at most ε/(2R), so it is ε/R-Lipschitz.
  if (field.lipschitz) f.lipschitz = *field.lipschitz + eps / radius;
  std::ostringstream lbl;
  lbl << field.label << "+tail(" << eps << "," << radius << ")";
  f.label = lbl.str();
  f.fn = [inner = field.fn, eps, radius](ConstVecRef x, VecRef out) {
    inner(x, out);
    double n = x.norm();
    if (n < 0.5 * radius) return;
    double ramp = n < radius ? 2.0 * n / radius - 1.0 : 1.0;
    out -= (0.5 * eps * ramp / n) * x;
  };
  return f;
}

StochasticDriftSpec ou_stochastic_drift(const DriftField& base, double alpha, double v) {
  require(std::isfinite(alpha) && alpha > 0, "ou_stochastic_drift: alpha must be positive");
  require(std::isfinite(v) && v > 0, "ou_stochastic_drift: v must be positive");
  StochasticDriftSpec s;
  s.base = base;
  s.aux_dim = base.dim;
  s.aux_drift = [alpha](ConstVecRef y, VecRef out) { out = -alpha * y; };
  auto d = static_cast<Eigen::Index>(base.dim);
  s.aux_noise = std::sqrt(2.0 * v) * Matrix::Identity(d, d);
  s.combine = [inner = base.fn](ConstVecRef x, ConstVecRef y, VecRef out) {
    inner(x, out);
    out += y;
  };
  std::ostringstream lbl;
  lbl << base.label << "+ou(" << alpha << "," << v << ")";
  s.label = lbl.str();
  return s;
}

double drift_error_sup(const DriftField& a, const DriftField& b, const SampleSet& probe) {
  require(a.dim == b.dim, "drift_error_sup: fields have different dimensions");
  if (probe.size() < 1) throw InvalidArgument("drift_error_sup: empty probe set");
  require_dim(a.dim, probe.dim(), "drift_error_sup probe");
  Vector x(probe.dim()), fa(probe.dim()), fb(probe.dim());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    x = probe.points.row(i).transpose();
    a.eval_into(x, fa);
    b.eval_into(x, fb);
    worst = std::max(worst, (fa - fb).norm());
  }
  return worst;
}

SampleSet gaussian_probe_cloud(const Vector& center, double scale, Eigen::Index n, std::uint64_t seed) {
  require(n >= 1, "gaussian_probe_cloud: n must be positive");
  require(scale >= 0, "gaussian_probe_cloud: scale must be nonnegative");
  Rng rng = make_rng(seed);
  SampleSet s{Matrix(n, center.size()), "probe-cloud", seed};
  Vector z(center.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    fill_standard_normal(rng, z);
    s.points.row(i) = (center + scale * z).transpose();
  }
  return s;
}

nlohmann::json to_json(const DriftRecord& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["params"] = r.params;
  return j;
}

DriftRecord drift_record_from_json(const nlohmann::json& j) {
  DriftRecord r;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("drift record: missing 'kind'");
  r.kind = j["kind"].get<std::string>();
  if (j.contains("params")) {
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_string()) throw ConfigError("drift record: parameter '" + k + "' must be a string");
      r.params[k] = v.get<std::string>();
    }
  }
  return r;
}

DriftField make_drift(const DriftRecord& record, TargetPtr model) {
  auto param = [&](const std::string& k) -> const std::string& {
    auto it = record.params.find(k);
    if (it == record.params.end()) throw ConfigError("drift '" + record.kind + "': missing parameter '" + k + "'");
    return it->second;
  };
  if (record.kind == "exact") return exact_drift(model);
  if (record.kind == "offset") {
    auto e = parse_double_list(param("eps"), "eps");
    Vector eps = Eigen::Map<const Vector>(e.data(), static_cast<Eigen::Index>(e.size()));
    if (static_cast<std::size_t>(eps.size()) != model->dim())
      throw ConfigError("drift 'offset': eps length does not match model dimension");
    return offset_drift(exact_drift(model), eps);
  }
  if (record.kind == "taylor2") {
    auto glm = std::dynamic_pointer_cast<const GLMPosterior>(model);
    if (!glm) throw ConfigError("drift 'taylor2' requires a GLM model");
    return taylor2_drift(glm);
  }
  if (record.kind == "tail_regularized") {
    return tail_regularized_drift(exact_drift(model), parse_double(param("eps"), "eps"),
                                  parse_double(param("radius"), "radius"));
  }
  throw ConfigError("unknown drift kind '" + record.kind + "'");
}

}  // namespace driftbound
