#include "liouville/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace liouville {

namespace {

// Bridge integrals must be far below the bisection tolerance.
QuadratureSpec bridge_spec() {
  QuadratureSpec spec;
  spec.radial_order = 12;
  spec.tolerance = 1e-14;
  spec.abs_tolerance = 1e-16;
  spec.panel_length = 0.125;
  spec.max_subdivisions = 100000;
  return spec;
}

}  // namespace

double bump(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double g_prime(double t, double k, double amplitude) {
  if (!(k > 2.0)) throw std::invalid_argument("g_prime: requires k > 2");
  if (!(amplitude > 0.0)) throw std::invalid_argument("g_prime: requires amplitude > 0");
  const double m = t * t + amplitude * bump(t);
  return (k - 2.0) * std::pow(m, 0.5 * (1.0 - k));
}

double g_second(double t, double k, double amplitude) {
  if (!(k > 2.0)) throw std::invalid_argument("g_second: requires k > 2");
  const double b = bump(t);
  const double m = t * t + amplitude * b;
  double dm = 2.0 * t;
  if (b > 0.0) {
    const double w = 1.0 - t * t;
    dm -= amplitude * b * 2.0 * t / (w * w);
  }
  return (k - 2.0) * 0.5 * (1.0 - k) * std::pow(m, -0.5 * (1.0 + k)) * dm;
}

IntegralResult bridge_integral(double k, double amplitude, const QuadratureSpec& spec) {
  return integrate_interval([&](double t) { return g_prime(t, k, amplitude); }, 0.0, 1.0, spec);
}

void require_admissible_k(double k, const ProfileOptions& options) {
  if (!(k >= options.k_floor)) {
    std::ostringstream os;
    os << "profile: exponent k must satisfy k > 2 (configured floor " << options.k_floor << "), got " << k;
    throw std::invalid_argument(os.str());
  }
}

double solve_bridge_amplitude(double k, double tol, const ProfileOptions& options) {
  require_admissible_k(k, options);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_bridge_amplitude: tolerance must be positive");
  const QuadratureSpec spec = bridge_spec();
  // The residual is strictly decreasing in A.
  auto residual = [&](double A) { return bridge_integral(k, A, spec).value - 1.0; };

  double lo = options.bracket_lo;
  double hi = options.bracket_hi;
  double r_lo = residual(lo);
  while (r_lo < 0.0) {
    if (lo <= options.bracket_min)
      throw std::runtime_error("solve_bridge_amplitude: cannot bracket the amplitude from below");
    hi = lo;
    lo = std::max(lo * 1e-3, options.bracket_min);
    r_lo = residual(lo);
  }
  double r_hi = residual(hi);
  while (r_hi > 0.0) {
    if (hi >= options.bracket_max)
      throw std::runtime_error("solve_bridge_amplitude: cannot bracket the amplitude from above");
    lo = hi;
    hi = std::min(hi * 1e3, options.bracket_max);
    r_hi = residual(hi);
  }
  if (std::abs(r_lo) <= tol) return lo;
  if (std::abs(r_hi) <= tol) return hi;

  for (int i = 0; i < options.max_bisections; ++i) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    const double r = residual(mid);
    if (std::abs(r) <= tol) return mid;
    if (!(mid > lo && mid < hi)) break;
    (r > 0.0 ? lo : hi) = mid;
  }
  throw std::runtime_error("solve_bridge_amplitude: bisection did not reach the residual tolerance");
}

struct Profile::State {
  double k = 3.0;
  double amplitude = 1.0;
  double residual = 0.0;
  double inverse_slope_bridge = 0.0;  // integral_0^1 dt / g'
  double step = 0.0;
  std::vector<double> primitive;  // bridge primitive at t_i = i * step
  std::vector<double> slope;      // Hermite slopes (g' limited for monotonicity)
};

Profile Profile::build(double k, double tol, const ProfileOptions& options) {
  auto state = std::make_shared<State>();
  state->k = k;
  state->amplitude = solve_bridge_amplitude(k, tol, options);
  const QuadratureSpec spec = bridge_spec();
  state->residual = bridge_integral(k, state->amplitude, spec).value - 1.0;
  state->inverse_slope_bridge =
      integrate_interval([&](double t) { return 1.0 / liouville::g_prime(t, k, state->amplitude); }, 0.0, 1.0,
                         spec)
          .value;

  const int n = std::max(16, options.cache_intervals);
  const double h = 1.0 / n;
  state->step = h;
  state->primitive.resize(n + 1);
  state->slope.resize(n + 1);
  const GaussRule& rule = gauss_legendre(16);
  double sum = 0.0;
  double carry = 0.0;  // Neumaier compensation
  state->primitive[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = i * h;
    double cell = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      cell += rule.weights[q] * liouville::g_prime(a + 0.5 * h * (1.0 + rule.nodes[q]), k, state->amplitude);
    cell *= 0.5 * h;
    const double t = sum + cell;
    carry += std::abs(sum) >= std::abs(cell) ? (sum - t) + cell : (cell - t) + sum;
    sum = t;
    state->primitive[i + 1] = sum + carry;
  }
  // Rescale so g(1) = 1 exactly: the bisection residual would otherwise show
  // up as a jump of g where the table meets the explicit tail.
  const double norm = 1.0 / state->primitive[n];
  for (auto& p : state->primitive) p *= norm;
  for (int i = 0; i <= n; ++i) state->slope[i] = norm * liouville::g_prime(i * h, k, state->amplitude);
  // Fritsch-Carlson limiter; a no-op for a well-resolved table.
  for (int i = 0; i < n; ++i) {
    const double secant = (state->primitive[i + 1] - state->primitive[i]) / h;
    const double a = state->slope[i] / secant;
    const double b = state->slope[i + 1] / secant;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      state->slope[i] = tau * a * secant;
      state->slope[i + 1] = tau * b * secant;
    }
  }
  return Profile(std::move(state));
}

double Profile::k() const { return state_->k; }
double Profile::amplitude() const { return state_->amplitude; }
double Profile::bridge_residual() const { return state_->residual; }

double Profile::g(double t) const {
  const double a = std::abs(t);
  double value;
  if (a >= 1.0) {
    value = 2.0 - std::pow(a, 2.0 - state_->k);
  } else {
    const double h = state_->step;
    const auto last = static_cast<int>(state_->primitive.size()) - 2;
    const int i = std::min(static_cast<int>(a / h), last);
    const double s = (a - i * h) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    value = h00 * state_->primitive[i] + h10 * h * state_->slope[i] + h01 * state_->primitive[i + 1] +
            h11 * h * state_->slope[i + 1];
  }
  return t < 0.0 ? -value : value;
}

double Profile::g_prime(double t) const { return liouville::g_prime(t, state_->k, state_->amplitude); }

double Profile::g_second(double t) const { return liouville::g_second(t, state_->k, state_->amplitude); }

double Profile::C1() const { return 8.0 / (state_->k * (state_->k - 2.0)); }

double Profile::C2() const { return 8.0 * state_->inverse_slope_bridge - C1(); }

double Profile::slab_bound(double R) const {
  if (!(R >= 0.0)) throw std::invalid_argument("slab_bound: R must be nonnegative");
  if (R >= 1.0) return C1() * std::pow(R, state_->k) + C2();
  if (R == 0.0) return 0.0;
  return 8.0 * integrate_interval([this](double t) { return 1.0 / g_prime(t); }, 0.0, R, bridge_spec()).value;
}

Potential::Potential(std::string name, Fn G, Fn dG, Fn d2G, Fn sqrt_second, Interval admissible)
    : name_(std::move(name)),
      G_(std::move(G)),
      dG_(std::move(dG)),
      d2G_(std::move(d2G)),
      sqrt_second_(std::move(sqrt_second)),
      admissible_(admissible) {
  if (!G_ || !dG_ || !d2G_ || !sqrt_second_) throw std::invalid_argument("Potential: missing evaluator");
  if (!(admissible_.lo < admissible_.hi)) throw std::invalid_argument("Potential: empty admissible interval");
}

double Potential::sqrt_second(double s) const {
  if (!admissible_.contains_open(s)) {
    std::ostringstream os;
    os << "Potential " << name_ << ": (sqrt G)'' requested at s=" << s << " outside the admissible interval ("
       << admissible_.lo << ", " << admissible_.hi << ")";
    throw std::domain_error(os.str());
  }
  return sqrt_second_(s);
}

double Potential::sqrt_first(double s) const {
  if (!admissible_.contains_open(s)) {
    std::ostringstream os;
    os << "Potential " << name_ << ": (sqrt G)' requested at s=" << s << " outside the admissible interval";
    throw std::domain_error(os.str());
  }
  return dG_(s) / (2.0 * std::sqrt(G_(s)));
}

Potential allen_cahn_potential() {
  return Potential(
      "allen-cahn", [](double s) { const double w = 1.0 - s * s; return 0.25 * w * w; },
      [](double s) { return -s * (1.0 - s * s); }, [](double s) { return 3.0 * s * s - 1.0; },
      [](double) { return -1.0; }, Interval{-1.0, 1.0});
}

std::optional<HConstant> hypothesis_H_constant(const Potential& G, Interval interval, int samples) {
  if (samples < 1) throw std::invalid_argument("hypothesis_H_constant: need at least one sample");
  if (!(interval.lo <= interval.hi)) throw std::invalid_argument("hypothesis_H_constant: empty interval");
  if (!G.admissible().contains_open(interval.lo) || !G.admissible().contains_open(interval.hi))
    throw std::invalid_argument("hypothesis_H_constant: interval leaves the admissible interval of G");
  double K = std::numeric_limits<double>::infinity();
  if (samples == 1) {
    K = -G.sqrt_second(0.5 * (interval.lo + interval.hi));
  } else {
    for (int i = 0; i < samples; ++i) {
      const double s = interval.lo + (interval.hi - interval.lo) * i / (samples - 1);
      K = std::min(K, -G.sqrt_second(s));
    }
  }
  if (!(K > 0.0)) return std::nullopt;
  return HConstant{K, interval};
}

OneDimSolution kink() {
  return {[](double x) { return std::tanh(x / std::numbers::sqrt2); },
          [](double x) {
            const double u = std::tanh(x / std::numbers::sqrt2);
            return (1.0 - u * u) / std::numbers::sqrt2;
          }};
}

}  // namespace liouville
