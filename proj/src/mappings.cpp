#include "modlab/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace modlab {

std::string_view to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::identity: return "identity";
    case MappingKind::winding: return "winding";
    case MappingKind::radial_stretch: return "radial_stretch";
    case MappingKind::inversion: return "inversion";
    case MappingKind::composition: return "composition";
  }
  return "unknown";
}

std::string_view to_string(LiftStatus s) {
  switch (s) {
    case LiftStatus::completed: return "completed";
    case LiftStatus::hit_puncture: return "hit_puncture";
    case LiftStatus::hit_outer_sphere: return "hit_outer_sphere";
  }
  return "unknown";
}

// ---------------------------------------------------------------- construction

namespace {

MappingSpec primitive(MappingKind kind, int n) {
  if (n < 2) throw InputError("MappingSpec: dimension must be >= 2");
  MappingSpec f;
  f.kind = kind;
  f.dim = n;
  f.center = Vec::Zero(n);
  return f;
}

}  // namespace

MappingSpec MappingSpec::identity(int n) { return primitive(MappingKind::identity, n); }

MappingSpec MappingSpec::winding(int k, int n) {
  auto f = primitive(MappingKind::winding, n);
  f.k = k;
  validate(f);
  return f;
}

MappingSpec MappingSpec::radial_stretch(double alpha, int n) {
  auto f = primitive(MappingKind::radial_stretch, n);
  f.alpha = alpha;
  validate(f);
  return f;
}

MappingSpec MappingSpec::inversion(int n) { return primitive(MappingKind::inversion, n); }

MappingSpec MappingSpec::composition(std::vector<MappingSpec> parts) {
  if (parts.empty()) throw InputError("MappingSpec::composition: needs at least one part");
  auto f = primitive(MappingKind::composition, parts.front().dim);
  f.center = parts.front().center;
  f.epsilon0 = parts.front().epsilon0;
  f.parts = std::move(parts);
  f = f.with_domain(f.center, f.epsilon0);
  validate(f);
  return f;
}

MappingSpec MappingSpec::with_domain(const Vec& x0, double eps0) const {
  MappingSpec g = *this;
  g.center = x0;
  g.epsilon0 = eps0;
  for (auto& p : g.parts) p = p.with_domain(x0, eps0);
  return g;
}

std::string MappingSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case MappingKind::winding: os << "winding(k=" << k << ")"; break;
    case MappingKind::radial_stretch: os << "radial_stretch(alpha=" << alpha << ")"; break;
    case MappingKind::composition: {
      os << "composition(";
      for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i].describe();
      os << ")";
      break;
    }
    default: os << to_string(kind);
  }
  return os.str();
}

void validate(const MappingSpec& f) {
  if (f.dim < 2) throw InputError("mapping: dimension must be >= 2");
  if (f.center.size() != f.dim || !f.center.allFinite())
    throw InputError("mapping: center must be a finite point of the mapping's dimension");
  if (!(f.epsilon0 > 0.0)) throw InputError("mapping: epsilon0 must be positive");
  switch (f.kind) {
    case MappingKind::winding:
      if (f.k < 1) throw InputError("mapping: winding number k must be >= 1");
      break;
    case MappingKind::radial_stretch:
      if (!(f.alpha > 0.0) || !std::isfinite(f.alpha)) throw InputError("mapping: alpha must be positive");
      break;
    case MappingKind::composition:
      if (f.parts.empty()) throw InputError("mapping: composition must be nonempty");
      for (const auto& p : f.parts) {
        if (p.dim != f.dim) throw InputError("mapping: composition parts differ in dimension");
        if ((p.center - f.center).norm() > 0.0) throw InputError("mapping: composition parts must share the center");
        validate(p);
      }
      break;
    default: break;
  }
}

namespace {

double parse_real(const std::string& key, const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("mapping." + key + ": not a number: '" + s + "'");
  }
}

Vec parse_vec(const std::string& key, const std::string& s) {
  std::vector<double> xs;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) xs.push_back(parse_real(key, tok));
  if (xs.empty()) throw InputError("mapping." + key + ": empty vector");
  return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

MappingSpec parse_primitive(const std::string& kind, int n, const std::string& k_str, const std::string& a_str) {
  if (kind == "identity") return MappingSpec::identity(n);
  if (kind == "inversion") return MappingSpec::inversion(n);
  if (kind == "winding") {
    if (k_str.empty()) throw InputError("mapping.k: required for winding");
    const double k = parse_real("k", k_str);
    if (k != std::floor(k) || k < 1) throw InputError("mapping.k: must be an integer >= 1");
    return MappingSpec::winding(static_cast<int>(k), n);
  }
  if (kind == "radial_stretch") {
    if (a_str.empty()) throw InputError("mapping.alpha: required for radial_stretch");
    const double a = parse_real("alpha", a_str);
    if (!(a > 0.0)) throw InputError("mapping.alpha: must be positive");
    return MappingSpec::radial_stretch(a, n);
  }
  throw InputError("mapping.kind: unknown kind '" + kind + "'");
}

}  // namespace

MappingSpec parse_mapping(const std::map<std::string, std::string>& params) {
  auto get = [&](const std::string& key) {
    auto it = params.find(key);
    return it == params.end() ? std::string{} : it->second;
  };
  const std::string kind = get("kind");
  if (kind.empty()) throw InputError("mapping.kind: missing");
  int n = 2;
  if (!get("dim").empty()) {
    const double d = parse_real("dim", get("dim"));
    if (d != std::floor(d) || d < 2) throw InputError("mapping.dim: must be an integer >= 2");
    n = static_cast<int>(d);
  }
  Vec x0 = Vec::Zero(n);
  if (!get("center").empty()) {
    x0 = parse_vec("center", get("center"));
    if (x0.size() != n) throw InputError("mapping.center: dimension differs from mapping.dim");
  }
  const double eps0 = get("epsilon0").empty() ? 1.0 : parse_real("epsilon0", get("epsilon0"));
  if (!(eps0 > 0.0)) throw InputError("mapping.epsilon0: must be positive");

  MappingSpec f;
  if (kind == "composition") {
    std::vector<MappingSpec> parts;
    std::istringstream is(get("parts"));
    std::string tok;
    while (std::getline(is, tok, ',')) {
      const auto colon = tok.find(':');
      const std::string pk = tok.substr(0, colon);
      const std::string arg = colon == std::string::npos ? "" : tok.substr(colon + 1);
      parts.push_back(parse_primitive(pk, n, arg, arg));
    }
    if (parts.empty()) throw InputError("mapping.parts: composition needs at least one part");
    f = MappingSpec::composition(std::move(parts));
  } else {
    f = parse_primitive(kind, n, get("k"), get("alpha"));
  }
  f = f.with_domain(x0, eps0);
  validate(f);
  return f;
}

// ---------------------------------------------------------------- evaluation

namespace {

// Maps in coordinates u = x - center.
Vec apply(const MappingSpec& f, const Vec& u) {
  switch (f.kind) {
    case MappingKind::identity: return u;
    case MappingKind::winding: {
      Vec v = u;
      const double rho = std::hypot(u[0], u[1]);
      if (rho == 0.0) return v;
      const double th = f.k * std::atan2(u[1], u[0]);
      v[0] = rho * std::cos(th);
      v[1] = rho * std::sin(th);
      return v;
    }
    case MappingKind::radial_stretch: return std::pow(u.norm(), f.alpha - 1.0) * u;
    case MappingKind::inversion: return u / u.squaredNorm();
    case MappingKind::composition: {
      Vec v = u;
      for (const auto& p : f.parts) v = apply(p, v);
      return v;
    }
  }
  return u;
}

Mat apply_derivative(const MappingSpec& f, const Vec& u) {
  const auto n = u.size();
  const Mat I = Mat::Identity(n, n);
  switch (f.kind) {
    case MappingKind::identity: return I;
    case MappingKind::winding: {
      const double rho = std::hypot(u[0], u[1]);
      if (rho == 0.0) throw ChartSingularity("winding map: derivative undefined on the winding axis");
      const double th = std::atan2(u[1], u[0]);
      const double kth = f.k * th;
      Eigen::Matrix2d out_frame, in_frame;
      out_frame << std::cos(kth), -f.k * std::sin(kth), std::sin(kth), f.k * std::cos(kth);
      in_frame << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      Mat D = I;
      D.topLeftCorner(2, 2) = out_frame * in_frame.transpose();
      return D;
    }
    case MappingKind::radial_stretch: {
      const double r = u.norm();
      const Vec e = u / r;
      return std::pow(r, f.alpha - 1.0) * (I + (f.alpha - 1.0) * e * e.transpose());
    }
    case MappingKind::inversion: {
      const double r2 = u.squaredNorm();
      const Vec e = u / std::sqrt(r2);
      return (I - 2.0 * e * e.transpose()) / r2;
    }
    case MappingKind::composition: {
      Mat D = I;
      Vec v = u;
      for (const auto& p : f.parts) {
        D = apply_derivative(p, v) * D;
        v = apply(p, v);
      }
      return D;
    }
  }
  return I;
}

std::vector<Vec> inverse_branches(const MappingSpec& f, const Vec& v) {
  switch (f.kind) {
    case MappingKind::identity: return {v};
    case MappingKind::winding: {
      const double rho = std::hypot(v[0], v[1]);
      if (rho == 0.0) return {v};
      const double th = std::atan2(v[1], v[0]);
      std::vector<Vec> out;
      for (int j = 0; j < f.k; ++j) {
        const double a = (th + 2.0 * std::numbers::pi * j) / f.k;
        Vec u = v;
        u[0] = rho * std::cos(a);
        u[1] = rho * std::sin(a);
        out.push_back(std::move(u));
      }
      return out;
    }
    case MappingKind::radial_stretch: {
      const double r = v.norm();
      if (r == 0.0) return {};
      return {std::pow(r, 1.0 / f.alpha - 1.0) * v};
    }
    case MappingKind::inversion: {
      const double r2 = v.squaredNorm();
      if (r2 == 0.0) return {};
      return {v / r2};
    }
    case MappingKind::composition: {
      std::vector<Vec> cur{v};
      for (auto it = f.parts.rbegin(); it != f.parts.rend(); ++it) {
        std::vector<Vec> next;
        for (const auto& w : cur)
          for (auto& u : inverse_branches(*it, w)) next.push_back(std::move(u));
        cur.swap(next);
      }
      return cur;
    }
  }
  return {};
}

void check_dim(const MappingSpec& f, const Vec& x) {
  if (x.size() != f.dim) throw InputError("mapping: point dimension differs from the mapping's");
}

}  // namespace

bool in_domain(const MappingSpec& f, const Vec& x) {
  check_dim(f, x);
  const double r = (x - f.center).norm();
  return r > 0.0 && r < f.epsilon0;
}

Vec evaluate(const MappingSpec& f, const Vec& x) {
  check_dim(f, x);
  const Vec u = x - f.center;
  if (u.squaredNorm() == 0.0) throw DomainError("evaluate: the puncture x0 is not in the domain");
  return f.center + apply(f, u);
}

ExtendedPoint evaluate(const MappingSpec& f, const ExtendedPoint& x) {
  if (x.is_infinite()) throw DomainError("evaluate: infinity is not in the domain");
  return ExtendedPoint(evaluate(f, x.coords()));
}

Mat derivative(const MappingSpec& f, const Vec& x) {
  check_dim(f, x);
  const Vec u = x - f.center;
  if (u.squaredNorm() == 0.0) throw DomainError("derivative: the puncture x0 is not in the domain");
  return apply_derivative(f, u);
}

Mat finite_difference_derivative(const MappingSpec& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw InputError("finite_difference_derivative: step must be positive");
  const auto n = x.size();
  Mat D(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    D.col(j) = (evaluate(f, xp) - evaluate(f, xm)) / (2.0 * h);
  }
  return D;
}

int multiplicity(const MappingSpec& f) {
  switch (f.kind) {
    case MappingKind::winding: return f.k;
    case MappingKind::composition: {
      int m = 1;
      for (const auto& p : f.parts) m *= multiplicity(p);
      return m;
    }
    default: return 1;
  }
}

std::vector<Vec> preimages(const MappingSpec& f, const Vec& y) {
  check_dim(f, y);
  std::vector<Vec> out;
  for (auto& u : inverse_branches(f, y - f.center)) {
    Vec x = f.center + u;
    if (in_domain(f, x)) out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------- images

bool ImageShell::contains(const Vec& y) const {
  const double r = (y - center).norm();
  return r > inner && r < outer;
}

double ImageShell::volume() const {
  const int n = static_cast<int>(center.size());
  return ball_volume(n, outer) - ball_volume(n, inner);
}

namespace {

// Image of the radial interval (lo, hi) and whether radius lo still maps to the
// inner side.
void push_shell(const MappingSpec& f, double& lo, double& hi, bool& inner_is_puncture) {
  switch (f.kind) {
    case MappingKind::radial_stretch:
      lo = std::pow(lo, f.alpha);
      hi = std::pow(hi, f.alpha);
      break;
    case MappingKind::inversion: {
      const double a = std::isinf(hi) ? 0.0 : 1.0 / hi;
      const double b = lo == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / lo;
      lo = a;
      hi = b;
      inner_is_puncture = !inner_is_puncture;
      break;
    }
    case MappingKind::composition:
      for (const auto& p : f.parts) push_shell(p, lo, hi, inner_is_puncture);
      break;
    default: break;
  }
}

}  // namespace

ImageShell image_shell(const MappingSpec& f) {
  ImageShell s;
  s.center = f.center;
  double lo = 0.0, hi = f.epsilon0;
  bool inner_is_puncture = true;
  push_shell(f, lo, hi, inner_is_puncture);
  s.inner = lo;
  s.outer = hi;
  s.puncture_inside = inner_is_puncture;
  return s;
}

ExtendedPoint limit_at_puncture(const MappingSpec& f) {
  const auto s = image_shell(f);
  if (s.puncture_inside) return ExtendedPoint(s.center);
  return ExtendedPoint::infinity(f.dim);
}

// ---------------------------------------------------------------- distortion

namespace {

DistortionReport make_report(double norm, double det, int n, const ExtendedPoint& at) {
  DistortionReport rep;
  rep.point = at;
  rep.operator_norm = norm;
  rep.jacobian_det = det;
  const double normn = std::pow(norm, n);
  if (norm == 0.0) {
    rep.k_o = 1.0;
    rep.degenerate = DegenerateCase::zero_derivative;
  } else if (std::abs(det) <= 1e-13 * normn) {
    rep.k_o = std::numeric_limits<double>::infinity();
    rep.degenerate = DegenerateCase::singular_jacobian;
  } else {
    rep.k_o = normn / std::abs(det);
  }
  return rep;
}

}  // namespace

DistortionReport distortion_from_matrix(const Mat& d, const ExtendedPoint& at) {
  if (d.rows() != d.cols() || d.rows() < 1) throw InputError("distortion_from_matrix: need a square matrix");
  Eigen::JacobiSVD<Mat> svd(d);
  const double norm = svd.singularValues()(0);
  return make_report(norm, d.determinant(), static_cast<int>(d.rows()), at);
}

DistortionReport distortion_at(const MappingSpec& f, const Vec& x, DerivativeMode mode) {
  check_dim(f, x);
  const Vec u = x - f.center;
  if (u.squaredNorm() == 0.0) throw DomainError("distortion_at: the puncture x0 is not in the domain");
  const ExtendedPoint at(x);
  if (const auto* fd = std::get_if<FiniteDifferenceMode>(&mode))
    return distortion_from_matrix(finite_difference_derivative(f, x, fd->h), at);
  const int n = f.dim;
  const double r = u.norm();
  switch (f.kind) {
    case MappingKind::identity: return make_report(1.0, 1.0, n, at);
    case MappingKind::winding:
      if (std::hypot(u[0], u[1]) == 0.0) throw ChartSingularity("winding map: chart singular on the axis");
      // Singular values 1 (radial) and k (tangential).
      return make_report(f.k, f.k, n, at);
    case MappingKind::radial_stretch: {
      // Singular values alpha r^{alpha-1} (radial) and r^{alpha-1} (n-1 tangential).
      const double s = std::pow(r, f.alpha - 1.0);
      return make_report(std::max(f.alpha, 1.0) * s, f.alpha * std::pow(s, n), n, at);
    }
    case MappingKind::inversion: return make_report(1.0 / (r * r), -std::pow(r, -2.0 * n), n, at);
    case MappingKind::composition: return distortion_from_matrix(apply_derivative(f, u), at);
  }
  return make_report(1.0, 1.0, n, at);
}

double max_distortion(const MappingSpec& f) {
  const int n = f.dim;
  switch (f.kind) {
    case MappingKind::identity:
    case MappingKind::inversion: return 1.0;
    case MappingKind::winding: return std::pow(f.k, n - 1);
    case MappingKind::radial_stretch: return std::pow(std::max(f.alpha, 1.0), n) / f.alpha;
    case MappingKind::composition: {
      // Sampled supremum over spheres inside the domain.
      const double reach = std::isinf(f.epsilon0) ? 1.0 : f.epsilon0;
      double k = 1.0;
      for (double frac : {0.05, 0.2, 0.45, 0.7, 0.95})
        for (const auto& dir : sphere_directions(n, 64, 7))
          k = std::max(k, distortion_at(f, f.center + frac * reach * dir).k_o);
      return k;
    }
  }
  return 1.0;
}

WeightQ weight_q(const MappingSpec& f, const ImageRegion& region) {
  WeightQ w;
  w.multiplicity = multiplicity(f);
  w.max_distortion = max_distortion(f);
  w.value = w.multiplicity * w.max_distortion;
  const auto shell = image_shell(f);
  const int n = f.dim;
  Vec c;
  double a = 0.0, b = 0.0;
  if (const auto* ring = std::get_if<SphericalRing>(&region)) {
    c = ring->center();
    a = ring->r_inner();
    b = ring->r_outer();
  } else {
    const auto& ball = std::get<EuclideanBall>(region);
    c = ball.center;
    b = ball.radius;
  }
  if (c.size() != n) throw InputError("weight_q: region dimension differs from the mapping's");
  if ((c - shell.center).norm() <= 1e-12 * (1.0 + shell.center.norm())) {
    const double lo = std::max(a, shell.inner);
    const double hi = std::min(b, shell.outer);
    w.region_volume = hi > lo ? ball_volume(n, hi) - ball_volume(n, lo) : 0.0;
  } else {
    if (std::isinf(b)) throw InputError("weight_q: unbounded region must be centred at the image centre");
    const SphericalRing ring(c, a > 0.0 ? a : 1e-9 * b, b);
    w.region_volume = integrate_over_ring([](const Vec&) { return 1.0; }, ring,
                                          [&](const Vec& y) { return shell.contains(y); }, 128)
                          .value;
  }
  w.l1_norm = std::isinf(w.value) ? std::numeric_limits<double>::infinity() : w.value * w.region_volume;
  return w;
}

// ---------------------------------------------------------------- lifting

LiftResult lift_curve(const MappingSpec& f, const Curve& image_curve, const Vec& start, double tau,
                      double ambiguity_tol) {
  if (image_curve.dim() != f.dim) throw InputError("lift_curve: dimension mismatch");
  if (!in_domain(f, start)) throw DomainError("lift_curve: start point is outside the domain");
  if ((evaluate(f, start) - image_curve.front()).norm() > tau)
    throw InputError("lift_curve: f(start) does not match the first image vertex");
  const auto shell = image_shell(f);
  const auto& img = image_curve.vertices();
  std::vector<Vec> lifted{start};
  auto status = LiftStatus::completed;
  for (std::size_t j = 1; j < img.size(); ++j) {
    const Vec& w = img[j];
    if (!shell.contains(w)) {
      const bool through_inner = (w - shell.center).norm() <= shell.inner;
      status = through_inner == shell.puncture_inside ? LiftStatus::hit_puncture : LiftStatus::hit_outer_sphere;
      break;
    }
    const auto pre = preimages(f, w);
    if (pre.empty()) {
      status = LiftStatus::hit_outer_sphere;
      break;
    }
    double best = std::numeric_limits<double>::infinity(), second = best;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < pre.size(); ++i) {
      const double d = (pre[i] - lifted.back()).norm();
      if (d < best) {
        second = best;
        best = d;
        pick = i;
      } else if (d < second) {
        second = d;
      }
    }
    if (second - best < ambiguity_tol) {
      std::ostringstream msg;
      msg << "lift_curve: two preimage branches are equally close at image vertex " << j;
      throw LiftingAmbiguity(msg.str());
    }
    lifted.push_back(pre[pick]);
  }
  if (lifted.size() < 2) throw DomainError("lift_curve: the image curve leaves f(D) at its first step");
  const std::size_t count = lifted.size();
  return LiftResult{Curve(std::move(lifted)), status, count};
}

// ---------------------------------------------------------------- cluster sets

std::vector<ExtendedPoint> cluster_set_estimate(const MappingSpec& f, const Vec& x0,
                                                const std::vector<double>& sample_radii, int samples_per_radius,
                                                double delta_c, std::uint64_t seed) {
  check_dim(f, x0);
  if (sample_radii.empty()) throw InputError("cluster_set_estimate: no sample radii");
  if (samples_per_radius < 1) throw InputError("cluster_set_estimate: samples_per_radius must be >= 1");
  for (std::size_t i = 0; i < sample_radii.size(); ++i) {
    if (!(sample_radii[i] > 0.0)) throw InputError("cluster_set_estimate: radii must be positive");
    if (i > 0 && !(sample_radii[i] < sample_radii[i - 1]))
      throw InputError("cluster_set_estimate: radii must decrease");
  }
  const int n = f.dim;
  std::vector<Vec> dirs;
  if (n == 2) {
    std::mt19937_64 rng(seed);
    const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (int j = 0; j < samples_per_radius; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + offset) / samples_per_radius;
      dirs.push_back((Vec(2) << std::cos(th), std::sin(th)).finished());
    }
  } else {
    dirs = sphere_directions(n, samples_per_radius, seed);
  }

  const std::size_t tail = std::min<std::size_t>(3, sample_radii.size());
  std::vector<ExtendedPoint> pts;
  std::vector<std::size_t> level;
  for (std::size_t i = sample_radii.size() - tail; i < sample_radii.size(); ++i) {
    for (const auto& d : dirs) {
      const Vec x = x0 + sample_radii[i] * d;
      if (!in_domain(f, x)) throw InputError("cluster_set_estimate: sample radius leaves the domain");
      pts.emplace_back(evaluate(f, x));
      level.push_back(i);
    }
  }
  // Single-linkage clustering.
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if (chordal_distance(pts[a], pts[b]) < delta_c) parent[find(a)] = find(b);

  std::map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t a = 0; a < pts.size(); ++a) clusters[find(a)].push_back(a);
  std::vector<ExtendedPoint> reps;
  for (const auto& [root, members] : clusters) {
    std::size_t deepest = 0;
    for (auto m : members) deepest = std::max(deepest, level[m]);
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = members.front();
    for (auto m : members) {
      if (level[m] != deepest) continue;
      double s = 0.0;
      for (auto o : members) s += chordal_distance(pts[m], pts[o]);
      if (s < best) {
        best = s;
        pick = m;
      }
    }
    const auto& rep = pts[pick];
    if (chordal_to_infinity(rep.coords()) < 1e-2 * delta_c) reps.push_back(ExtendedPoint::infinity(n));
    else reps.push_back(rep);
  }
  return reps;
}

}  // namespace modlab
