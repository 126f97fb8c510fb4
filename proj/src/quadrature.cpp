#include "liouville/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>

namespace liouville {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTrapezoidNodes = 1 << 22;

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dx = p1 / (n * (x * p1 - p0) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

int next_pow2_at_least(double x) {
  int m = 1;
  while (m < x && m < kMaxTrapezoidNodes) m <<= 1;
  return m;
}

// Tolerances for nested (inner) integrals: tighter than the outer target so
// the outer error estimate is not polluted by inner noise.
QuadratureSpec inner_spec(const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.tolerance = std::max(spec.tolerance * 1e-2, 1e-14);
  inner.abs_tolerance = spec.abs_tolerance * 1e-2;
  return inner;
}

using PeriodicIntegrand = std::function<void(double, std::span<double>)>;

// Trapezoid rule over [0, 2pi) with node doubling; error = |T_2M - T_M|.
// `seen` carries the largest ring mass met so far by the enclosing integral. A
// ring whose differences stall at rounding level of that mass is accepted, which
// covers rings where the integrand cancels to noise.
void periodic_trapezoid(const PeriodicIntegrand& g, std::size_t m, int start_nodes,
                        const QuadratureSpec& spec, std::span<double> value, std::span<double> error,
                        double& seen) {
  std::vector<double> sum(m, 0.0);
  std::vector<double> abs_sum(m, 0.0);
  std::vector<double> buf(m, 0.0);
  int nodes = std::max(2, start_nodes);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int j = 0; j < nodes; ++j) {
    std::fill(buf.begin(), buf.end(), 0.0);
    g(two_pi * j / nodes, buf);
    for (std::size_t c = 0; c < m; ++c) {
      sum[c] += buf[c];
      abs_sum[c] += std::abs(buf[c]);
    }
  }
  std::vector<double> prev(m);
  for (std::size_t c = 0; c < m; ++c) prev[c] = two_pi * sum[c] / nodes;
  double last_diff = std::numeric_limits<double>::infinity();

  while (true) {
    const int fine = 2 * nodes;
    if (fine > kMaxTrapezoidNodes) throw QuadratureError("periodic trapezoid: node budget exhausted");
    for (int j = 0; j < nodes; ++j) {
      std::fill(buf.begin(), buf.end(), 0.0);
      g(two_pi * (2 * j + 1) / fine, buf);
      for (std::size_t c = 0; c < m; ++c) {
        sum[c] += buf[c];
        abs_sum[c] += std::abs(buf[c]);
      }
    }
    double diff = 0.0;
    double scale = 0.0;
    double mass = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      value[c] = two_pi * sum[c] / fine;
      diff = std::max(diff, std::abs(value[c] - prev[c]));
      scale = std::max(scale, std::abs(value[c]));
      mass = std::max(mass, two_pi * abs_sum[c] / fine);
    }
    seen = std::max(seen, mass);
    const double target = std::max({spec.abs_tolerance, spec.tolerance * scale, 64.0 * kEps * mass});
    const bool stalled = diff <= 64.0 * kEps * seen && diff >= 0.5 * last_diff;
    last_diff = diff;
    nodes = fine;
    if (diff <= target || stalled) {
      for (std::size_t c = 0; c < m; ++c) error[c] = std::abs(value[c] - prev[c]);
      return;
    }
    prev.assign(value.begin(), value.end());
  }
}

// Splits [lo, hi] into pieces of length at most `length`, appending the
// interior and final points to `breaks`.
void append_uniform(std::vector<double>& breaks, double lo, double hi, double length) {
  const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / length)));
  for (int i = 1; i < pieces; ++i) breaks.push_back(lo + (hi - lo) * i / pieces);
  breaks.push_back(hi);
}

std::vector<double> radial_partition(double r0, double r1, std::span<const double> radial_breaks,
                                     double length) {
  std::vector<double> cuts;
  for (double b : radial_breaks)
    if (b > r0 && b < r1) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> breaks{r0};
  double lo = r0;
  for (double c : cuts) {
    append_uniform(breaks, lo, c, length);
    lo = c;
  }
  append_uniform(breaks, lo, r1, length);
  return breaks;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (radial_order < 2 || angular_order < 2)
    throw std::invalid_argument("QuadratureSpec: orders must be >= 2");
  if (!(tolerance > 0.0) || !(abs_tolerance >= 0.0))
    throw std::invalid_argument("QuadratureSpec: tolerance must be > 0");
  if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
  if (!(panel_length > 0.0)) throw std::invalid_argument("QuadratureSpec: panel_length must be > 0");
}

Region Region::ball(int dim, double radius) {
  Region r{Kind::ball, dim, 0.0, radius};
  r.validate();
  return r;
}

Region Region::annulus(int dim, double r_inner, double r_outer) {
  Region r{Kind::annulus, dim, r_inner, r_outer};
  r.validate();
  return r;
}

Region Region::slab(int dim, double half_width) {
  Region r{Kind::slab, dim, 0.0, half_width};
  r.validate();
  return r;
}

Region Region::interval(double a, double b) {
  Region r{Kind::interval, 1, a, b};
  r.validate();
  return r;
}

void Region::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Region: dimension out of range");
  switch (kind) {
    case Kind::ball:
    case Kind::slab:
      if (!(outer > 0.0)) throw std::invalid_argument("Region: radius must be positive");
      break;
    case Kind::annulus:
      if (!(inner > 0.0) || !(inner < outer))
        throw std::invalid_argument("Region: annulus requires 0 < R1 < R2");
      break;
    case Kind::interval:
      if (!(inner < outer)) throw std::invalid_argument("Region: interval requires a < b");
      break;
  }
}

std::string Region::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::ball: os << "ball(N=" << dim << ", R=" << outer << ")"; break;
    case Kind::annulus: os << "annulus(N=" << dim << ", " << inner << ", " << outer << ")"; break;
    case Kind::slab: os << "slab(N=" << dim << ", R=" << outer << ")"; break;
    case Kind::interval: os << "interval(" << inner << ", " << outer << ")"; break;
  }
  return os.str();
}

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss_legendre(n));
  return *slot;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double unit_ball_volume(int dim) {
  if (dim < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

MultiResult integrate_adaptive(const LineIntegrand& f, std::size_t m, std::span<const double> breaks,
                               const QuadratureSpec& spec) {
  spec.validate();
  if (m == 0) throw std::invalid_argument("integrate_adaptive: no components");
  if (breaks.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least two breaks");
  for (std::size_t i = 1; i < breaks.size(); ++i)
    if (!(breaks[i - 1] < breaks[i]))
      throw std::invalid_argument("integrate_adaptive: breaks must be strictly increasing");

  const GaussRule& low = gauss_legendre(spec.radial_order);
  const GaussRule& high = gauss_legendre(2 * spec.radial_order);

  struct Panel {
    double a;
    double b;
    bool live;
  };
  std::vector<Panel> panels;
  std::vector<double> pval;   // m per panel
  std::vector<double> perr;   // m per panel
  std::vector<double> pmass;  // m per panel, integral of |f|
  std::vector<double> total(m, 0.0), total_err(m, 0.0), total_mass(m, 0.0);

  std::vector<double> v(m), e(m), qlo(m), qhi(m), ehi(m), mass(m);
  auto evaluate = [&](double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::fill(qlo.begin(), qlo.end(), 0.0);
    std::fill(qhi.begin(), qhi.end(), 0.0);
    std::fill(ehi.begin(), ehi.end(), 0.0);
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < low.nodes.size(); ++i) {
      std::fill(v.begin(), v.end(), 0.0);
      std::fill(e.begin(), e.end(), 0.0);
      f(c + h * low.nodes[i], v, e);
      for (std::size_t j = 0; j < m; ++j) qlo[j] += low.weights[i] * v[j];
    }
    for (std::size_t i = 0; i < high.nodes.size(); ++i) {
      std::fill(v.begin(), v.end(), 0.0);
      std::fill(e.begin(), e.end(), 0.0);
      f(c + h * high.nodes[i], v, e);
      for (std::size_t j = 0; j < m; ++j) {
        qhi[j] += high.weights[i] * v[j];
        ehi[j] += high.weights[i] * std::abs(e[j]);
        mass[j] += high.weights[i] * std::abs(v[j]);
      }
    }
    const std::size_t base = pval.size();
    for (std::size_t j = 0; j < m; ++j) {
      pval.push_back(h * qhi[j]);
      perr.push_back(h * std::abs(qhi[j] - qlo[j]) + h * ehi[j]);
      pmass.push_back(h * mass[j]);
      total[j] += pval[base + j];
      total_err[j] += perr[base + j];
      total_mass[j] += pmass[base + j];
    }
  };

  auto panel_norm = [&](std::size_t idx) {
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, perr[idx * m + j]);
    return worst;
  };

  struct Entry {
    double err;
    double a;
    std::size_t idx;
    bool operator<(const Entry& o) const {
      if (err != o.err) return err < o.err;
      return a > o.a;
    }
  };
  std::priority_queue<Entry> queue;

  for (std::size_t i = 1; i < breaks.size(); ++i) {
    panels.push_back({breaks[i - 1], breaks[i], true});
    evaluate(breaks[i - 1], breaks[i]);
    queue.push({panel_norm(panels.size() - 1), breaks[i - 1], panels.size() - 1});
  }

  auto converged = [&] {
    double err = 0.0;
    double scale = 0.0;
    double mass_scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      err = std::max(err, total_err[j]);
      scale = std::max(scale, std::abs(total[j]));
      mass_scale = std::max(mass_scale, total_mass[j]);
    }
    const double target =
        std::max({spec.abs_tolerance, spec.tolerance * scale, 128.0 * kEps * mass_scale});
    return err <= target;
  };

  while (!converged()) {
    if (queue.empty())
      throw QuadratureError("adaptive quadrature: no refinable panel left before tolerance was met");
    if (static_cast<int>(panels.size()) >= spec.max_subdivisions)
      throw QuadratureError("adaptive quadrature: tolerance not met within max subdivisions");
    const Entry top = queue.top();
    queue.pop();
    const Panel parent = panels[top.idx];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b) ||
        parent.b - parent.a <= 64.0 * kEps * std::max(std::abs(parent.a), std::abs(parent.b)))
      continue;  // resolution floor; keep the panel as is
    panels[top.idx].live = false;
    for (std::size_t j = 0; j < m; ++j) {
      total[j] -= pval[top.idx * m + j];
      total_err[j] -= perr[top.idx * m + j];
      total_mass[j] -= pmass[top.idx * m + j];
    }
    panels.push_back({parent.a, mid, true});
    evaluate(parent.a, mid);
    queue.push({panel_norm(panels.size() - 1), parent.a, panels.size() - 1});
    panels.push_back({mid, parent.b, true});
    evaluate(mid, parent.b);
    queue.push({panel_norm(panels.size() - 1), mid, panels.size() - 1});
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < panels.size(); ++i)
    if (panels[i].live) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return panels[x].a < panels[y].a; });

  MultiResult out;
  out.value.resize(m);
  out.error.resize(m);
  std::vector<double> column(order.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < order.size(); ++i) column[i] = pval[order[i] * m + j];
    out.value[j] = pairwise_sum(column);
    for (std::size_t i = 0; i < order.size(); ++i) column[i] = perr[order[i] * m + j];
    out.error[j] = pairwise_sum(column);
  }
  return out;
}

MultiResult integrate_region(const PointIntegrand& f, std::size_t m, const Region& region,
                             const QuadratureSpec& spec, std::span<const double> radial_breaks) {
  region.validate();
  spec.validate();
  if (region.kind == Region::Kind::slab)
    throw std::invalid_argument("integrate: slab regions require a certified separable integrand");

  if (region.kind == Region::Kind::interval) {
    std::vector<double> breaks = radial_partition(region.inner, region.outer, radial_breaks, spec.panel_length);
    LineIntegrand line = [&](double t, std::span<double> val, std::span<double>) {
      const std::array<double, 1> x{t};
      f(x, val);
    };
    return integrate_adaptive(line, m, breaks, spec);
  }

  if (region.dim > 3)
    throw std::invalid_argument("integrate: ball and annulus quadrature is available for N <= 3 only");

  const double r0 = region.kind == Region::Kind::annulus ? region.inner : 0.0;
  const double r1 = region.outer;
  const std::vector<double> breaks = radial_partition(r0, r1, radial_breaks, spec.panel_length);
  const QuadratureSpec inner = inner_spec(spec);
  const QuadratureSpec innermost = inner_spec(inner);
  double seen = 0.0;

  switch (region.dim) {
    case 1: {
      std::vector<double> buf(m);
      LineIntegrand line = [&](double r, std::span<double> val, std::span<double>) {
        std::array<double, 1> x{r};
        f(x, val);
        std::fill(buf.begin(), buf.end(), 0.0);
        x[0] = -r;
        f(x, buf);
        for (std::size_t j = 0; j < m; ++j) val[j] += buf[j];
      };
      return integrate_adaptive(line, m, breaks, spec);
    }
    case 2: {
      LineIntegrand line = [&](double r, std::span<double> val, std::span<double> err) {
        const double arc_nodes = 2.0 * std::numbers::pi * r * spec.radial_order / spec.panel_length;
        const int start = std::max(spec.angular_order, next_pow2_at_least(arc_nodes));
        PeriodicIntegrand ring = [&](double theta, std::span<double> out) {
          const std::array<double, 2> x{r * std::sin(theta), r * std::cos(theta)};
          f(x, out);
        };
        periodic_trapezoid(ring, m, start, inner, val, err, seen);
        for (std::size_t j = 0; j < m; ++j) {
          val[j] *= r;
          err[j] *= r;
        }
      };
      return integrate_adaptive(line, m, breaks, spec);
    }
    case 3: {
      LineIntegrand line = [&](double r, std::span<double> val, std::span<double> err) {
        if (r == 0.0) return;
        std::vector<double> polar_breaks{0.0};
        append_uniform(polar_breaks, 0.0, std::numbers::pi,
                       std::numbers::pi / std::max(1.0, std::ceil(std::numbers::pi * r / spec.panel_length)));
        LineIntegrand polar = [&](double theta, std::span<double> pv, std::span<double> pe) {
          const double rho = r * std::sin(theta);
          const double z = r * std::cos(theta);
          PeriodicIntegrand ring = [&](double psi, std::span<double> out) {
            const std::array<double, 3> x{rho * std::cos(psi), rho * std::sin(psi), z};
            f(x, out);
          };
          periodic_trapezoid(ring, m, spec.angular_order, innermost, pv, pe, seen);
          const double s = std::sin(theta);
          for (std::size_t j = 0; j < m; ++j) {
            pv[j] *= s;
            pe[j] *= s;
          }
        };
        const MultiResult shell = integrate_adaptive(polar, m, polar_breaks, inner);
        for (std::size_t j = 0; j < m; ++j) {
          val[j] = r * r * shell.value[j];
          err[j] = r * r * shell.error[j];
        }
      };
      return integrate_adaptive(line, m, breaks, spec);
    }
    default:
      break;
  }
  throw std::logic_error("integrate_region: unreachable");
}

IntegralResult integrate(const ScalarField& f, const Region& region, const QuadratureSpec& spec,
                         std::span<const double> radial_breaks) {
  if (f.dim() != region.dim)
    throw std::invalid_argument("integrate: field dimension does not match region dimension");
  PointIntegrand pf = [&](Point x, std::span<double> out) { out[0] = f(x); };
  const MultiResult r = integrate_region(pf, 1, region, spec, radial_breaks);
  return {r.value[0], r.error[0]};
}

IntegralResult integrate(const SeparableField& f, const Region& region, const QuadratureSpec& spec) {
  region.validate();
  if (region.kind != Region::Kind::slab)
    throw std::invalid_argument("integrate: separable integrands are integrated over slabs only");
  if (f.dim != region.dim) throw std::invalid_argument("integrate: field dimension does not match region dimension");
  if (!f.axial) throw std::invalid_argument("integrate: separable integrand has no axial factor");
  const IntegralResult axial = integrate_interval(f.axial, -region.outer, region.outer, spec);
  return {f.transverse_integral * axial.value, std::abs(f.transverse_integral) * axial.error};
}

IntegralResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureSpec& spec) {
  if (!(a < b)) throw std::invalid_argument("integrate_interval: requires a < b");
  std::vector<double> breaks{a};
  append_uniform(breaks, a, b, spec.panel_length);
  LineIntegrand line = [&](double t, std::span<double> val, std::span<double>) { val[0] = f(t); };
  const MultiResult r = integrate_adaptive(line, 1, breaks, spec);
  return {r.value[0], r.error[0]};
}

double norm_p(const ScalarField& f, const Region& region, double p, const QuadratureSpec& spec) {
  if (!(p > 0.0)) throw std::invalid_argument("norm_p: p must be positive");
  if (f.dim() != region.dim)
    throw std::invalid_argument("norm_p: field dimension does not match region dimension");
  PointIntegrand pf = [&](Point x, std::span<double> out) { out[0] = std::pow(std::abs(f(x)), p); };
  const MultiResult r = integrate_region(pf, 1, region, spec);
  return std::pow(r.value[0], 1.0 / p);
}

HolderNorms holder_norms(const ScalarField& alpha, const ScalarField& beta, const Region& region,
                         const QuadratureSpec& spec, std::span<const double> radial_breaks) {
  if (alpha.dim() != region.dim || beta.dim() != region.dim)
    throw std::invalid_argument("holder_norms: field dimension does not match region dimension");
  PointIntegrand pf = [&](Point x, std::span<double> out) {
    const double a = std::abs(alpha(x));
    const double b = std::abs(beta(x));
    out[0] = a * b;
    out[1] = std::pow(a, 1.5);
    out[2] = b * b * b;
  };
  const MultiResult r = integrate_region(pf, 3, region, spec, radial_breaks);
  return {r.value[0], std::pow(r.value[1], 2.0 / 3.0), std::cbrt(r.value[2])};
}

}  // namespace liouville
