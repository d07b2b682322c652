#include "modlab/modulus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "parallel.hpp"

namespace modlab {

double ring_modulus_analytic(int n, double r1, double r2) {
  if (n < 2) throw InputError("ring_modulus_analytic: n must be >= 2");
  if (!(r1 > 0.0) || !(r2 > r1)) throw InputError("ring_modulus_analytic: require 0 < r1 < r2");
  return unit_sphere_area(n) / std::pow(std::log(r2 / r1), n - 1);
}

// ---------------------------------------------------------------- solver

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dual of  min sum_c |cell| rho_c^p  s.t.  <len_i, rho> >= 1  on an active set.
class DualProblem {
 public:
  DualProblem(const std::vector<CellLengths>& rows, std::size_t cells, double p, double cell_volume)
      : rows_(rows), p_(p), a_(cell_volume), s_(Vec::Zero(static_cast<Eigen::Index>(cells))),
        rho_(Vec::Zero(static_cast<Eigen::Index>(cells))), touched_(cells, 0) {}

  void activate(std::size_t row) {
    active_.push_back(row);
    lambda_.push_back(0.0);
    for (auto c : rows_[row].cells) {
      if (!touched_[c]) {
        touched_[c] = 1;
        cells_.push_back(c);
      }
    }
  }

  std::size_t size() const { return active_.size(); }
  std::vector<double>& lambda() { return lambda_; }
  const Vec& rho() const { return rho_; }

  /// Dual objective at `lam`; fills rho and grad_i = 1 - <len_i, rho>.
  double evaluate(const std::vector<double>& lam, std::vector<double>& grad) {
    for (auto c : cells_) s_[static_cast<Eigen::Index>(c)] = 0.0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (lam[i] == 0.0) continue;
      const auto& row = rows_[active_[i]];
      for (std::size_t k = 0; k < row.cells.size(); ++k)
        s_[static_cast<Eigen::Index>(row.cells[k])] += lam[i] * row.lengths[k];
    }
    energy_ = 0.0;
    const double denom = p_ * a_;
    for (auto c : cells_) {
      const auto ci = static_cast<Eigen::Index>(c);
      const double s = s_[ci];
      double r = 0.0;
      if (s > 0.0) {
        if (p_ == 2.0) r = s / denom;
        else if (p_ == 3.0) r = std::sqrt(s / denom);
        else r = std::pow(s / denom, 1.0 / (p_ - 1.0));
      }
      rho_[ci] = r;
      energy_ += a_ * std::pow(r, p_);
    }
    grad.resize(active_.size());
    double sum_lam = 0.0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      grad[i] = 1.0 - rows_[active_[i]].dot(rho_);
      sum_lam += lam[i];
    }
    return sum_lam - (p_ - 1.0) * energy_;
  }

  double energy() const { return energy_; }

  /// Initial step: inverse of the largest diagonal curvature (exact for p = 2).
  double initial_step(std::size_t row) const {
    const auto& r = rows_[row];
    double q = 0.0;
    for (double l : r.lengths) q += l * l;
    return q > 0.0 ? (p_ * a_) / q : 1.0;
  }

 private:
  const std::vector<CellLengths>& rows_;
  double p_, a_;
  Vec s_, rho_;
  std::vector<char> touched_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> cells_;
  std::vector<double> lambda_;
  double energy_ = 0.0;
};

struct InnerOutcome {
  bool converged;
  long iterations;
  double dual_value;
};

// Nonmonotone spectral projected gradient ascent (Birgin-Martinez-Raydan).
InnerOutcome spg_ascent(DualProblem& dual, double& step, double tol, long budget) {
  constexpr int kMemory = 10;
  constexpr double kArmijo = 1e-4;
  auto& lam = dual.lambda();
  const std::size_t m = lam.size();
  std::vector<double> grad, grad_t, lam_t(m), dir(m);
  double g = dual.evaluate(lam, grad);
  std::deque<double> history{g};
  long it = 0;
  for (;; ++it) {
    double pg = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      pg = std::max(pg, lam[i] > 0.0 ? std::abs(grad[i]) : std::max(grad[i], 0.0));
    if (pg <= tol) return {true, it, g};
    if (it >= budget) return {false, it, g};

    double gd = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      dir[i] = std::max(0.0, lam[i] + step * grad[i]) - lam[i];
      gd += grad[i] * dir[i];
    }
    const double g_ref = *std::min_element(history.begin(), history.end());
    double theta = 1.0;
    double g_t = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < m; ++i) lam_t[i] = std::max(0.0, lam[i] + theta * dir[i]);
      g_t = dual.evaluate(lam_t, grad_t);
      if (g_t >= g_ref + kArmijo * theta * gd) break;
      theta *= 0.5;
    }
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = lam_t[i] - lam[i];
      ss += s * s;
      sy -= s * (grad_t[i] - grad[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-30, 1e30) : std::min(step * 4.0, 1e30);
    lam.swap(lam_t);
    grad.swap(grad_t);
    g = g_t;
    history.push_back(g);
    if (history.size() > kMemory) history.pop_front();
  }
}

std::vector<CellLengths> build_rows(const CurveFamily& family, const GridSpec& grid, int threads) {
  std::vector<CellLengths> rows(family.size());
  detail::parallel_for(family.size(), threads,
                       [&](std::size_t i) { rows[i] = cell_lengths(grid, family.curves[i]); });
  return rows;
}

void integrals(const std::vector<CellLengths>& rows, const Vec& rho, int threads, std::vector<double>& out) {
  out.resize(rows.size());
  detail::parallel_for(rows.size(), threads, [&](std::size_t i) { out[i] = rows[i].dot(rho); });
}

}  // namespace

ModulusResult discrete_modulus(const CurveFamily& family, const GridSpec& grid, double p,
                               const SolverOptions& options) {
  if (!(p > 1.0)) throw InputError("discrete_modulus: exponent p must exceed 1");
  if (!(options.tol > 0.0)) throw InputError("discrete_modulus: tol must be positive");
  if (options.add_per_round < 1) throw InputError("discrete_modulus: add_per_round must be >= 1");
  family.validate();
  if (!family.empty() && family.dim() != grid.dim())
    throw InputError("discrete_modulus: family and grid dimensions differ");

  ModulusResult result{.density = GridDensity(grid)};
  result.family_size = family.size();
  if (family.empty()) return result;

  const auto rows = build_rows(family, grid, options.threads);
  DualProblem dual(rows, grid.cell_count(), p, grid.cell_volume());
  const double inner_tol = 0.25 * options.tol;
  std::vector<char> is_active(rows.size(), 0);
  std::vector<double> ints;
  std::vector<std::size_t> order(rows.size());
  double step = 0.0;
  double dual_value = 0.0;

  auto feasible_value = [&](const std::vector<double>& current) {
    const double lo = *std::min_element(current.begin(), current.end());
    if (lo <= 0.0) return kInfinity;
    return dual.energy() * std::pow(std::max(1.0, 1.0 / lo), p);
  };

  integrals(rows, dual.rho(), options.threads, ints);
  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Most violated first; stable sort keeps the lowest index among ties.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return ints[x] < ints[y]; });
    if (1.0 - ints[order.front()] < options.tol) break;

    int added = 0;
    for (std::size_t k = 0; k < order.size() && added < options.add_per_round; ++k) {
      const auto i = order[k];
      if (1.0 - ints[i] < options.tol) break;
      if (is_active[i]) continue;
      is_active[i] = 1;
      dual.activate(i);
      if (step == 0.0) step = dual.initial_step(i);
      ++added;
    }
    if (added == 0) {
      // Active constraints remain violated: only possible when the inner solve stalled.
      throw SolverBudgetExceeded("discrete_modulus: active constraints cannot be satisfied",
                                 feasible_value(ints));
    }
    ++result.rounds;
    const auto inner = spg_ascent(dual, step, inner_tol, options.max_iterations - result.iterations);
    result.iterations += inner.iterations;
    dual_value = inner.dual_value;
    integrals(rows, dual.rho(), options.threads, ints);
    if (!inner.converged) {
      std::ostringstream msg;
      msg << "discrete_modulus: iteration budget " << options.max_iterations << " exhausted after "
          << result.rounds << " rounds";
      throw SolverBudgetExceeded(msg.str(), feasible_value(ints));
    }
  }

  const double lo = *std::min_element(ints.begin(), ints.end());
  const double scale = lo < 1.0 ? 1.0 / lo : 1.0;
  Vec values = scale * dual.rho();
  result.density = GridDensity(grid, std::move(values));
  result.value = std::pow(scale, p) * dual.energy();
  result.lower_bound = dual_value;
  result.active_constraints = dual.size();
  integrals(rows, result.density.values(), options.threads, ints);
  result.residual = std::max(0.0, 1.0 - *std::min_element(ints.begin(), ints.end()));
  return result;
}

nlohmann::json to_json(const ModulusResult& r) {
  const auto& g = r.density.grid();
  return {{"value", r.value},
          {"lower_bound", r.lower_bound},
          {"iterations", r.iterations},
          {"rounds", r.rounds},
          {"active_constraints", r.active_constraints},
          {"residual", r.residual},
          {"family_size", r.family_size},
          {"grid",
           {{"lower", std::vector<double>(g.lower().begin(), g.lower().end())},
            {"upper", std::vector<double>(g.upper().begin(), g.upper().end())},
            {"resolution", g.resolution()}}}};
}

void write_density_csv(std::ostream& os, const GridDensity& density) {
  const auto& g = density.grid();
  const auto old_prec = os.precision(std::numeric_limits<double>::max_digits10);
  os << "cell";
  for (int d = 0; d < g.dim(); ++d) os << ",x" << d;
  os << ",rho\n";
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Vec x = g.cell_center(c);
    os << c;
    for (int d = 0; d < g.dim(); ++d) os << ',' << x[d];
    os << ',' << density[c] << '\n';
  }
  os.precision(old_prec);
}

// ---------------------------------------------------------------- eta

EtaFunction EtaFunction::piecewise(std::vector<double> breaks, std::vector<double> values) {
  if (breaks.size() < 2 || values.size() + 1 != breaks.size())
    throw InputError("EtaFunction::piecewise: need k+1 breakpoints for k values");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i + 1] > breaks[i])) throw InputError("EtaFunction::piecewise: breakpoints must increase");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("EtaFunction: values must be finite and nonnegative");
  EtaFunction e;
  e.kind_ = Kind::piecewise_constant;
  e.lo_ = breaks.front();
  e.hi_ = breaks.back();
  e.breaks_ = std::move(breaks);
  e.values_ = std::move(values);
  return e;
}

EtaFunction EtaFunction::inverse_log(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw InputError("EtaFunction::inverse_log: require 0 < r1 < r2");
  EtaFunction e;
  e.kind_ = Kind::inverse_log;
  e.scale_ = 1.0 / std::log(r2 / r1);
  e.exponent_ = -1.0;
  e.lo_ = r1;
  e.hi_ = r2;
  return e;
}

EtaFunction EtaFunction::power(double scale, double exponent, double a, double b) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InputError("EtaFunction::power: scale must be nonnegative");
  if (!(a > 0.0) || !(b > a)) throw InputError("EtaFunction::power: require 0 < a < b");
  EtaFunction e;
  e.kind_ = Kind::power;
  e.scale_ = scale;
  e.exponent_ = exponent;
  e.lo_ = a;
  e.hi_ = b;
  return e;
}

EtaFunction EtaFunction::power_law(double exponent, double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw InputError("EtaFunction::power_law: require 0 < r1 < r2");
  const double q = exponent + 1.0;
  const double mass = std::abs(q) < 1e-12 ? std::log(r2 / r1) : (std::pow(r2, q) - std::pow(r1, q)) / q;
  return power(1.0 / mass, exponent, r1, r2);
}

double EtaFunction::operator()(double r) const {
  if (r < lo_ || r > hi_) return 0.0;
  if (kind_ == Kind::piecewise_constant) {
    if (r == hi_) return values_.back();
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
    return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
  }
  return scale_ * std::pow(r, exponent_);
}

std::string EtaFunction::describe() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind_) {
    case Kind::piecewise_constant:
      if (values_.size() == 1) os << "uniform(" << lo_ << "," << hi_ << ")";
      else os << "piecewise(" << values_.size() << " pieces on [" << lo_ << "," << hi_ << "])";
      break;
    case Kind::inverse_log: os << "inverse_log(" << lo_ << "," << hi_ << ")"; break;
    case Kind::power: os << "power(" << scale_ << "*r^" << exponent_ << " on [" << lo_ << "," << hi_ << "])"; break;
  }
  return os.str();
}

EtaFunction uniform_eta(double r1, double r2) {
  if (!(r2 > r1)) throw InputError("uniform_eta: require r1 < r2");
  return EtaFunction::piecewise({r1, r2}, {1.0 / (r2 - r1)});
}

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGLNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

template <typename F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  double total = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * w;
    const double mid = lo + 0.5 * w;
    for (std::size_t j = 0; j < kGLNodes.size(); ++j) total += kGLWeights[j] * f(mid + 0.5 * w * kGLNodes[j]);
  }
  return 0.5 * w * total;
}

}  // namespace

AdmissibleCheck admissible_check(const EtaFunction& eta, double r1, double r2) {
  if (!(r2 > r1)) throw InputError("admissible_check: require r1 < r2");
  for (double v : eta.values())
    if (v < 0.0) throw InputError("admissible_check: negative eta value");
  const double a = std::max(r1, eta.support_lo());
  const double b = std::min(r2, eta.support_hi());
  double integral = 0.0;
  if (b > a) {
    if (eta.kind() == EtaFunction::Kind::piecewise_constant) {
      const auto& br = eta.breaks();
      const auto& vals = eta.values();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const double lo = std::max(a, br[i]);
        const double hi = std::min(b, br[i + 1]);
        if (hi > lo) integral += vals[i] * (hi - lo);
      }
    } else {
      if (eta(0.5 * (a + b)) < 0.0) throw InputError("admissible_check: negative eta value");
      integral = gauss_legendre(eta, a, b, 64);
    }
  }
  return {integral >= 1.0 - 1e-12, integral};
}

// ---------------------------------------------------------------- quadrature

namespace {

double ring_quadrature_at(const ScalarField& integrand, const SphericalRing& ring, const Indicator& mask, int m) {
  const int n = ring.dim();
  const Vec& c = ring.center();
  const double r1 = ring.r_inner(), r2 = ring.r_outer();
  const double h = 2.0 * r2 / m;
  const double cell_vol = std::pow(h, n);
  const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(n));
  const int sub = std::max(2, static_cast<int>(std::lround(std::pow(16.0, 1.0 / n))));
  int sub_total = 1;
  for (int d = 0; d < n; ++d) sub_total *= sub;

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vec x(n), y(n);
  double total = 0.0;
  for (;;) {
    for (int d = 0; d < n; ++d) x[d] = c[d] - r2 + (idx[static_cast<std::size_t>(d)] + 0.5) * h;
    const double rc = (x - c).norm();
    if (rc - half_diag < r2 && rc + half_diag > r1) {
      if (rc - half_diag > r1 && rc + half_diag < r2) {
        if (mask(x)) total += integrand(x) * cell_vol;
      } else {
        double acc = 0.0;
        for (int s = 0; s < sub_total; ++s) {
          int rem = s;
          for (int d = 0; d < n; ++d) {
            const int k = rem % sub;
            rem /= sub;
            y[d] = x[d] - 0.5 * h + (k + 0.5) * h / sub;
          }
          const double ry = (y - c).norm();
          if (ry > r1 && ry < r2 && mask(y)) acc += integrand(y);
        }
        total += acc * cell_vol / sub_total;
      }
    }
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == n) break;
  }
  return total;
}

}  // namespace

QuadratureResult integrate_over_ring(const ScalarField& integrand, const SphericalRing& ring, const Indicator& mask,
                                     int resolution, double rel_tol) {
  if (resolution < 2) throw InputError("integrate_over_ring: resolution must be >= 2");
  const int n = ring.dim();
  const long max_cells = 1L << 24;
  QuadratureResult res;
  res.resolution = resolution;
  res.value = ring_quadrature_at(integrand, ring, mask, resolution);
  for (;;) {
    const int next = res.resolution * 2;
    if (std::pow(static_cast<double>(next), n) > static_cast<double>(max_cells)) break;
    const double v = ring_quadrature_at(integrand, ring, mask, next);
    const double change = std::abs(v - res.value);
    res.value = v;
    res.resolution = next;
    if (change <= rel_tol * std::abs(v) || v == 0.0) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double weighted_rhs_integral(const ScalarField& q, const EtaFunction& eta, const SphericalRing& ring,
                             const Indicator& domain_mask, int n, int resolution) {
  if (n != ring.dim()) throw InputError("weighted_rhs_integral: n differs from the ring dimension");
  const Vec y0 = ring.center();
  auto integrand = [&](const Vec& y) {
    const double e = eta((y - y0).norm());
    if (e == 0.0) return 0.0;
    return q(y) * std::pow(e, n);
  };
  return integrate_over_ring(integrand, ring, domain_mask, resolution).value;
}

// ---------------------------------------------------------------- blow-up

CurveFamily blowup_family(double separation, int resolution, const BlowupGeometry& geom) {
  if (!(separation >= 0.0)) throw InputError("blowup_family: separation must be nonnegative");
  if (resolution < 2) throw InputError("blowup_family: resolution must be >= 2");
  const double outer = geom.outer_fraction * geom.eps0;
  if (!(separation / 2.0 < outer)) throw InputError("blowup_family: separation leaves no room for the segments");
  const double h = 2.0 * geom.eps0 / resolution;
  const double spacing = 0.5 * h;
  const double r_min = 0.5 * separation;
  /// Radii on the lattice (i + 1/2) * spacing, so the arcs sit at the same
  /// place relative to the cells at every resolution.
  const int top = static_cast<int>(std::floor(outer / spacing - 0.5));
  CurveFamily fam;
  std::ostringstream label;
  label << "arcs joining [" << separation / 2 << "," << outer << "] and its reflection";
  fam.label = label.str();
  for (int i = top; i >= 0; --i) {
    const double r = (i + 0.5) * spacing;
    if (r < r_min) break;
    const int verts = std::clamp(static_cast<int>(std::ceil(std::numbers::pi * r / spacing)) + 1, 16, 256);
    for (double sign : {1.0, -1.0}) {
      std::vector<Vec> pts;
      pts.reserve(static_cast<std::size_t>(verts));
      for (int k = 0; k < verts; ++k) {
        const double phi = sign * std::numbers::pi * k / (verts - 1);
        pts.push_back((Vec(2) << r * std::cos(phi), r * std::sin(phi)).finished());
      }
      pts.back() = (Vec(2) << -r, 0.0).finished();
      fam.curves.emplace_back(std::move(pts));
    }
  }
  return fam;
}

double blowup_experiment(double separation, int resolution, const SolverOptions& options,
                         const BlowupGeometry& geom) {
  const auto fam = blowup_family(separation, resolution, geom);
  const auto grid = GridSpec::centered(Vec::Zero(2), geom.eps0, resolution);
  return discrete_modulus(fam, grid, 2.0, options).value;
}

}  // namespace modlab
