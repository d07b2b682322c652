#include "modlab/curves.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace modlab {

// ---------------------------------------------------------------- Curve

Curve::Curve(std::vector<Vec> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw InputError("Curve: need at least two vertices");
  const auto n = vertices_.front().size();
  if (n < 1) throw InputError("Curve: empty vertex");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].size() != n) throw InputError("Curve: mixed vertex dimensions");
    if (!vertices_[i].allFinite()) throw InputError("Curve: non-finite vertex");
    if (i > 0 && (vertices_[i] - vertices_[i - 1]).squaredNorm() == 0.0)
      throw InputError("Curve: consecutive vertices coincide at index " + std::to_string(i));
  }
}

double Curve::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i) len += (vertices_[i] - vertices_[i - 1]).norm();
  return len;
}

Vec Curve::at(double u) const {
  const double last = static_cast<double>(vertices_.size() - 1);
  u = std::clamp(u, 0.0, last);
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i >= vertices_.size() - 1) i = vertices_.size() - 2;
  const double t = u - static_cast<double>(i);
  if (t == 0.0) return vertices_[i];
  if (t == 1.0) return vertices_[i + 1];
  return vertices_[i] + t * (vertices_[i + 1] - vertices_[i]);
}

void CurveFamily::validate() const {
  for (const auto& c : curves)
    if (c.dim() != dim()) throw InputError("CurveFamily: curves of different dimension");
}

// ---------------------------------------------------------------- grids

GridSpec::GridSpec(Vec lower, Vec upper, std::vector<int> resolution)
    : lower_(std::move(lower)), upper_(std::move(upper)), resolution_(std::move(resolution)) {
  const auto n = lower_.size();
  if (n < 1 || upper_.size() != n || resolution_.size() != static_cast<std::size_t>(n))
    throw InputError("GridSpec: inconsistent dimensions");
  if (!lower_.allFinite() || !upper_.allFinite()) throw InputError("GridSpec: non-finite bounds");
  cell_.resize(n);
  cell_volume_ = 1.0;
  cell_count_ = 1;
  for (Eigen::Index d = 0; d < n; ++d) {
    if (!(upper_[d] > lower_[d])) throw InputError("GridSpec: upper bound must exceed lower bound");
    const int r = resolution_[static_cast<std::size_t>(d)];
    if (r < 2) throw InputError("GridSpec: resolution must be >= 2 per axis");
    cell_[d] = (upper_[d] - lower_[d]) / r;
    cell_volume_ *= cell_[d];
    cell_count_ *= static_cast<std::size_t>(r);
  }
}

GridSpec GridSpec::cube(const Vec& lower, const Vec& upper, int resolution) {
  return GridSpec(lower, upper, std::vector<int>(static_cast<std::size_t>(lower.size()), resolution));
}

GridSpec GridSpec::centered(const Vec& center, double half_width, int resolution) {
  if (!(half_width > 0.0)) throw InputError("GridSpec::centered: half_width must be positive");
  const Vec h = Vec::Constant(center.size(), half_width);
  return cube(center - h, center + h, resolution);
}

bool GridSpec::contains(const Vec& x, double slack) const {
  for (Eigen::Index d = 0; d < lower_.size(); ++d) {
    const double tol = slack * (upper_[d] - lower_[d]);
    if (x[d] < lower_[d] - tol || x[d] > upper_[d] + tol) return false;
  }
  return true;
}

std::size_t GridSpec::cell_of(const Vec& x) const {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (Eigen::Index d = 0; d < lower_.size(); ++d) {
    const int r = resolution_[static_cast<std::size_t>(d)];
    int i = static_cast<int>(std::floor((x[d] - lower_[d]) / cell_[d]));
    i = std::clamp(i, 0, r - 1);
    index += static_cast<std::size_t>(i) * stride;
    stride *= static_cast<std::size_t>(r);
  }
  return index;
}

Vec GridSpec::cell_center(std::size_t index) const {
  Vec c(lower_.size());
  for (Eigen::Index d = 0; d < lower_.size(); ++d) {
    const auto r = static_cast<std::size_t>(resolution_[static_cast<std::size_t>(d)]);
    const auto i = index % r;
    index /= r;
    c[d] = lower_[d] + (static_cast<double>(i) + 0.5) * cell_[d];
  }
  return c;
}

GridDensity::GridDensity(GridSpec grid)
    : grid_(std::move(grid)), values_(Vec::Zero(static_cast<Eigen::Index>(grid_.cell_count()))) {}

GridDensity::GridDensity(GridSpec grid, Vec values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid_.cell_count()))
    throw InputError("GridDensity: value count does not match the grid");
  if ((values_.array() < 0.0).any() || !values_.allFinite())
    throw InputError("GridDensity: values must be finite and nonnegative");
}

GridDensity GridDensity::constant(GridSpec grid, double value) {
  const auto n = static_cast<Eigen::Index>(grid.cell_count());
  return GridDensity(std::move(grid), Vec::Constant(n, value));
}

double GridDensity::energy(double p) const {
  return grid_.cell_volume() * values_.array().pow(p).sum();
}

// ---------------------------------------------------------------- line integrals

double CellLengths::dot(const Vec& rho) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) s += lengths[k] * rho[static_cast<Eigen::Index>(cells[k])];
  return s;
}

CellLengths cell_lengths(const GridSpec& grid, const Curve& curve) {
  if (curve.dim() != grid.dim()) throw InputError("cell_lengths: curve and grid dimensions differ");
  constexpr double kSlack = 1e-12;
  for (const auto& v : curve.vertices())
    if (!grid.contains(v, kSlack)) throw InputError("line_integral: curve leaves the grid bounds");

  CellLengths out;
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<double> ts;
  const auto n = grid.dim();
  const auto& verts = curve.vertices();
  for (std::size_t s = 0; s + 1 < verts.size(); ++s) {
    const Vec& a = verts[s];
    const Vec delta = verts[s + 1] - a;
    const double seg_len = delta.norm();
    ts.assign({0.0, 1.0});
    for (int d = 0; d < n; ++d) {
      if (delta[d] == 0.0) continue;
      const double h = grid.cell_size()[d];
      const double lo = std::min(a[d], a[d] + delta[d]);
      const double hi = std::max(a[d], a[d] + delta[d]);
      const double first = std::floor((lo - grid.lower()[d]) / h) + 1.0;
      for (double j = first;; j += 1.0) {
        const double plane = grid.lower()[d] + j * h;
        if (plane >= hi) break;
        const double t = (plane - a[d]) / delta[d];
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double dt = ts[k + 1] - ts[k];
      if (dt <= 0.0) continue;
      const Vec mid = a + (0.5 * (ts[k] + ts[k + 1])) * delta;
      const std::size_t cell = grid.cell_of(mid);
      const double piece = dt * seg_len;
      if (!out.cells.empty() && out.cells.back() == cell) {
        out.lengths.back() += piece;
        continue;
      }
      auto [it, inserted] = slot.try_emplace(cell, out.cells.size());
      if (inserted) {
        out.cells.push_back(cell);
        out.lengths.push_back(piece);
      } else {
        out.lengths[it->second] += piece;
      }
    }
  }
  return out;
}

double line_integral(const GridDensity& rho, const Curve& curve) {
  return cell_lengths(rho.grid(), curve).dot(rho.values());
}

// ---------------------------------------------------------------- crossings

namespace {

struct SphereEvent {
  double u;    // fractional vertex parameter
  int sphere;  // 0 inner, 1 outer
};

void segment_sphere_hits(const Vec& a, const Vec& b, const Vec& c, double radius, std::size_t seg,
                         int sphere, std::vector<SphereEvent>& out) {
  const Vec d = b - a;
  const Vec ac = a - c;
  const double A = d.squaredNorm();
  const double B = 2.0 * d.dot(ac);
  const double C = ac.squaredNorm() - radius * radius;
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) {
    // Grazing incidence lost to rounding still counts as a touch.
    if (disc < -1e-12 * (B * B + std::abs(4.0 * A * C))) return;
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (B + std::copysign(sq, B));
  double roots[2];
  int count = 0;
  if (q != 0.0) {
    roots[count++] = q / A;
    roots[count++] = C / q;
  } else {
    roots[count++] = 0.0;  // B == 0 and C == 0
  }
  for (int k = 0; k < count; ++k) {
    double t = roots[k];
    if (t < -1e-12 || t > 1.0 + 1e-12) continue;
    t = std::clamp(t, 0.0, 1.0);
    out.push_back({static_cast<double>(seg) + t, sphere});
  }
}

}  // namespace

Curve crossing_subcurve(const Curve& curve, const SphericalRing& ring, double tau) {
  if (curve.dim() != ring.dim()) throw InputError("crossing_subcurve: dimension mismatch");
  const auto& v = curve.vertices();
  const double radii[2] = {ring.r_inner(), ring.r_outer()};
  std::vector<SphereEvent> events;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = (v[i] - ring.center()).norm();
    for (int s = 0; s < 2; ++s)
      if (std::abs(r - radii[s]) <= tau) events.push_back({static_cast<double>(i), s});
    if (i + 1 < v.size())
      for (int s = 0; s < 2; ++s) segment_sphere_hits(v[i], v[i + 1], ring.center(), radii[s], i, s, events);
  }
  std::sort(events.begin(), events.end(), [](const SphereEvent& x, const SphereEvent& y) {
    return x.u < y.u || (x.u == y.u && x.sphere < y.sphere);
  });
  // Merge repeated reports of the same touch (vertex check and quadratic root).
  std::vector<SphereEvent> merged;
  for (const auto& e : events) {
    bool dup = false;
    for (auto it = merged.rbegin(); it != merged.rend() && e.u - it->u <= 1e-12; ++it)
      if (it->sphere == e.sphere) dup = true;
    if (!dup) merged.push_back(e);
  }
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    if (merged[k].sphere == merged[k + 1].sphere) continue;
    const double u1 = merged[k].u;
    const double u2 = merged[k + 1].u;
    std::vector<Vec> pts;
    pts.push_back(curve.at(u1));
    for (std::size_t j = 0; j < v.size(); ++j) {
      const auto uj = static_cast<double>(j);
      if (uj > u1 && uj < u2 && (v[j] - pts.back()).squaredNorm() > 0.0) pts.push_back(v[j]);
    }
    Vec end = curve.at(u2);
    if ((end - pts.back()).squaredNorm() == 0.0) continue;
    pts.push_back(std::move(end));
    return Curve(std::move(pts));
  }
  throw NoCrossing("crossing_subcurve: curve does not join the two bounding spheres");
}

MinorizationReport minorizes(const CurveFamily& family, const SphericalRing& ring, double tau) {
  MinorizationReport rep;
  rep.sample_size = family.size();
  rep.extracted.label = "crossing subcurves of " + family.label;
  for (std::size_t i = 0; i < family.size(); ++i) {
    try {
      rep.extracted.curves.push_back(crossing_subcurve(family.curves[i], ring, tau));
    } catch (const NoCrossing&) {
      rep.failed.push_back(i);
    }
  }
  rep.holds = rep.failed.empty();
  return rep;
}

// ---------------------------------------------------------------- families

std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed) {
  if (n < 2) throw InputError("sphere_directions: n must be >= 2");
  if (count < 1) throw InputError("sphere_directions: count must be >= 1");
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * i / count;
      dirs.push_back((Vec(2) << std::cos(th), std::sin(th)).finished());
    }
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ph = golden * i;
      dirs.push_back((Vec(3) << rr * std::cos(ph), rr * std::sin(ph), z).finished());
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int i = 0; i < count; ++i) {
      Vec u(n);
      do {
        for (int d = 0; d < n; ++d) u[d] = g(rng);
      } while (u.norm() < 1e-8);
      dirs.push_back(u.normalized());
    }
  }
  return dirs;
}

namespace {

// A unit vector orthogonal to u, used as the rotation partner for spirals.
Vec orthogonal_partner(const Vec& u) {
  if (u.size() == 2) return (Vec(2) << -u[1], u[0]).finished();
  Eigen::Index k = 0;
  u.cwiseAbs().minCoeff(&k);
  Vec e = Vec::Unit(u.size(), k);
  e -= e.dot(u) * u;
  return e.normalized();
}

}  // namespace

CurveFamily generate_ring_family(const SphericalRing& ring, int count, RingFamilyKind kind,
                                 int vertex_budget) {
  if (count < 1) throw InputError("generate_ring_family: count must be >= 1");
  if (kind == RingFamilyKind::spiral && vertex_budget < 2)
    throw InputError("generate_ring_family: vertex budget must be >= 2");
  const int n = ring.dim();
  CurveFamily fam;
  fam.label = std::string(kind == RingFamilyKind::radial ? "radial" : "spiral") + " family of ring";
  const auto dirs = sphere_directions(n, count);
  const double r1 = ring.r_inner(), r2 = ring.r_outer();
  for (const auto& u : dirs) {
    if (kind == RingFamilyKind::radial) {
      fam.curves.emplace_back(std::vector<Vec>{ring.center() + r1 * u, ring.center() + r2 * u});
      continue;
    }
    // Logarithmic spiral r = r1 e^s, angle advances by the pitch (1 rad) per unit s.
    const Vec w = orthogonal_partner(u);
    const double span = std::log(r2 / r1);
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(vertex_budget));
    for (int i = 0; i < vertex_budget; ++i) {
      const double s = span * i / (vertex_budget - 1);
      const double r = (i == vertex_budget - 1) ? r2 : r1 * std::exp(s);
      pts.push_back(ring.center() + r * (std::cos(s) * u + std::sin(s) * w));
    }
    fam.curves.emplace_back(std::move(pts));
  }
  return fam;
}

Curve resample(const Curve& curve, int vertices) {
  if (vertices < 2) throw InputError("resample: need at least two vertices");
  const auto& v = curve.vertices();
  std::vector<double> cum(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) cum[i] = cum[i - 1] + (v[i] - v[i - 1]).norm();
  const double total = cum.back();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(vertices));
  out.push_back(v.front());
  std::size_t seg = 0;
  for (int k = 1; k < vertices - 1; ++k) {
    const double s = total * k / (vertices - 1);
    while (seg + 2 < v.size() && cum[seg + 1] < s) ++seg;
    const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out.push_back(v[seg] + t * (v[seg + 1] - v[seg]));
  }
  out.push_back(v.back());
  return Curve(std::move(out));
}

// ---------------------------------------------------------------- text format

void write_family(std::ostream& os, const CurveFamily& family) {
  const auto old_prec = os.precision(std::numeric_limits<double>::max_digits10);
  os << "# modlab curve family\n# label: " << family.label << '\n';
  for (const auto& c : family.curves) {
    bool first_vertex = true;
    for (const auto& v : c.vertices()) {
      if (!first_vertex) os << ' ';
      first_vertex = false;
      for (Eigen::Index d = 0; d < v.size(); ++d) os << (d ? "," : "") << v[d];
    }
    os << '\n';
  }
  os.precision(old_prec);
}

CurveFamily read_family(std::istream& is) {
  CurveFamily fam;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view tag = "# label: ";
      if (line.rfind(tag, 0) == 0) fam.label = line.substr(tag.size());
      continue;
    }
    std::istringstream ls(line);
    std::string token;
    std::vector<Vec> verts;
    while (ls >> token) {
      std::vector<double> xs;
      std::istringstream ts(token);
      std::string num;
      while (std::getline(ts, num, ',')) {
        try {
          xs.push_back(std::stod(num));
        } catch (const std::exception&) {
          throw InputError("read_family: line " + std::to_string(lineno) + ": bad number '" + num + "'");
        }
      }
      verts.push_back(Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }
    try {
      fam.curves.emplace_back(std::move(verts));
    } catch (const InputError& e) {
      throw InputError("read_family: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  fam.validate();
  return fam;
}

}  // namespace modlab
