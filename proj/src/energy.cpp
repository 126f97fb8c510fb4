#include "liouville/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace liouville {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_ascending(std::span<const double> radii, const char* who) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i - 1] < radii[i])) throw std::invalid_argument(std::string(who) + ": radii must be ascending");
}

// Log-log slope of |q| over the last decade of radii; 0 when fewer than two
// usable points remain.
double quotient_trend(std::span<const double> radii, std::span<const double> q) {
  const double cut = radii.back() / 10.0 * (1.0 - 1e-12);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] >= cut && std::abs(q[i]) > 0.0) {
      x.push_back(radii[i]);
      y.push_back(std::abs(q[i]));
    }
  }
  if (x.size() < 2) return 0.0;
  return fit_loglog_slope(x, y);
}

}  // namespace

std::string_view to_string(GrowthMode mode) { return mode == GrowthMode::ball ? "ball" : "slab"; }

double GrowthSeries::bound(std::size_t i) const { return C1 * std::pow(radii.at(i), k) + C2; }

GrowthSeries growth_series(const Counterexample& fields, const Profile& profile, std::span<const double> radii,
                           GrowthMode mode, const QuadratureSpec& spec) {
  const int N = fields.phi.dim();
  if (radii.empty()) throw std::invalid_argument("growth_series: no radii");
  require_ascending(radii, "growth_series");
  if (radii.front() < 1.0) throw std::invalid_argument("growth_series: radii must be >= 1");
  if (mode == GrowthMode::ball && N > 3)
    throw std::invalid_argument("growth_series: ball mode requires N <= 3; use slab mode");

  GrowthSeries series;
  series.mode = mode;
  series.dim = N;
  series.k = profile.k();
  series.C1 = profile.C1();
  series.C2 = profile.C2();
  series.radii.assign(radii.begin(), radii.end());

  const ScalarField& phi = fields.phi;
  const ScalarField& sigma = fields.sigma;
  for (double R : radii) {
    IntegralResult r;
    if (mode == GrowthMode::ball) {
      const ScalarField integrand(N, [&](Point x) {
        const double v = phi(x) * sigma(x);
        return v * v;
      });
      const std::array<double, 1> breaks{1.0};
      r = integrate(integrand, Region::ball(N, R), spec, breaks);
    } else {
      // sigma^2 < 4 and the transverse factor H^2 integrates to one.
      const SeparableField majorant{N, 1.0, [&](double t) { return 4.0 / profile.g_prime(t); }};
      r = integrate(majorant, Region::slab(N, R), spec);
    }
    series.values.push_back(r.value);
    series.errors.push_back(r.error);
  }
  try {
    series.fitted_slope = fit_exponent(series);
  } catch (const std::invalid_argument&) {
    series.fitted_slope = kNaN;
  }
  return series;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog_slope: data must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog_slope: abscissae are all equal");
  return sxy / sxx;
}

double fit_exponent(const GrowthSeries& series) {
  const auto& R = series.radii;
  if (R.size() < 5 || R.back() < 10.0 * R.front() * (1.0 - 1e-12))
    throw std::invalid_argument("fit_exponent: radii must number >= 5 and span at least one decade");
  const double cut = R.back() / 10.0 * (1.0 - 1e-12);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R[i] >= cut) {
      x.push_back(R[i]);
      y.push_back(series.values[i]);
    }
  }
  if (x.size() < 5) throw std::invalid_argument("fit_exponent: fewer than 5 radii in the last decade");
  return fit_loglog_slope(x, y);
}

double modica_check(const ScalarField& u, const Potential& G, const SampleSet& points) {
  if (u.dim() != points.dim) throw std::invalid_argument("modica_check: dimension mismatch");
  std::array<double, kMaxDim> grad{};
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point x = points[i];
    u.gradient(x, std::span<double>(grad.data(), u.dim()));
    double g2 = 0.0;
    for (int d = 0; d < u.dim(); ++d) g2 += grad[d] * grad[d];
    worst = std::max(worst, 0.5 * g2 - G.G(u(x)));
  }
  return worst;
}

EnergyLedger energy_ledger(const ScalarField& u, const Potential& G, double R, const QuadratureSpec& spec) {
  const int N = u.dim();
  if (N > 3) throw std::invalid_argument("energy_ledger: ball quadrature requires N <= 3");
  PointIntegrand integrand = [&](Point x, std::span<double> out) {
    std::array<double, kMaxDim> grad{};
    u.gradient(x, std::span<double>(grad.data(), N));
    double g2 = 0.0;
    for (int d = 0; d < N; ++d) g2 += grad[d] * grad[d];
    const double kinetic = 0.5 * g2;
    const double pot = G.G(u(x));
    const double gap = pot - kinetic;
    out[0] = kinetic;
    out[1] = pot;
    out[2] = gap;
    out[3] = gap * std::sqrt(std::max(pot, 0.0));
  };
  const MultiResult r = integrate_region(integrand, 4, Region::ball(N, R), spec);
  EnergyLedger ledger;
  ledger.dim = N;
  ledger.R = R;
  ledger.dirichlet = r.value[0];
  ledger.potential = r.value[1];
  ledger.deficit = r.value[2];
  ledger.weighted_deficit = r.value[3];
  ledger.phi_R = std::pow(R, 1.0 - N) * (ledger.dirichlet + ledger.potential);
  ledger.ratio = ledger.potential != 0.0 ? ledger.dirichlet / ledger.potential : kNaN;
  ledger.error = *std::max_element(r.error.begin(), r.error.end());
  return ledger;
}

std::vector<EnergyLedger> energy_ledgers(const ScalarField& u, const Potential& G, std::span<const double> radii,
                                         const QuadratureSpec& spec) {
  require_ascending(radii, "energy_ledgers");
  std::vector<EnergyLedger> out;
  out.reserve(radii.size());
  for (double R : radii) out.push_back(energy_ledger(u, G, R, spec));
  return out;
}

double min_phi_increment(std::span<const EnergyLedger> ledgers) {
  if (ledgers.size() < 2) throw std::invalid_argument("min_phi_increment: need at least two radii");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ledgers.size(); ++i) worst = std::min(worst, ledgers[i].phi_R - ledgers[i - 1].phi_R);
  return worst;
}

double monotonicity_check(const ScalarField& u, const Potential& G, std::span<const double> radii,
                          const QuadratureSpec& spec) {
  return min_phi_increment(energy_ledgers(u, G, radii, spec));
}

std::vector<std::pair<double, double>> ratio_series(std::span<const EnergyLedger> ledgers) {
  std::vector<std::pair<double, double>> out;
  for (const auto& l : ledgers) {
    if (!(l.potential > 0.0))
      throw std::domain_error("ratio_series: potential energy vanishes on a ball; the field is not admissible");
    out.emplace_back(l.R, l.dirichlet / l.potential);
  }
  return out;
}

std::vector<std::pair<double, double>> ratio_series(const ScalarField& u, const Potential& G,
                                                    std::span<const double> radii, const QuadratureSpec& spec) {
  const auto ledgers = energy_ledgers(u, G, radii, spec);
  return ratio_series(ledgers);
}

double ratio_lower_envelope(double C2, double c0, double R) { return 1.0 - 2.0 * C2 / (c0 * std::cbrt(R)); }

DeficitBoundResult deficit_bound_check(std::span<const EnergyLedger> ledgers, int N, double K,
                                       std::optional<double> M, double zero_floor) {
  if (ledgers.size() < 5) throw std::invalid_argument("deficit_bound_check: need ledgers at >= 5 radii");
  if (!(K > 0.0)) throw std::invalid_argument("deficit_bound_check: hypothesis (H) constant must be positive");
  std::vector<double> radii, qi, qii;
  for (const auto& l : ledgers) {
    radii.push_back(l.R);
    qi.push_back(l.weighted_deficit / std::pow(l.R, N - 2.0));
    qii.push_back(l.deficit / std::pow(l.R, N - 4.0 / 3.0));
  }
  require_ascending(radii, "deficit_bound_check");

  DeficitBoundResult result;
  result.C1_measured = *std::max_element(qi.begin(), qi.end());
  result.C2_measured = *std::max_element(qii.begin(), qii.end());
  auto small = [&](const std::vector<double>& q) {
    return std::all_of(q.begin(), q.end(), [&](double v) { return std::abs(v) <= zero_floor; });
  };
  constexpr double kTrendLimit = 0.1;
  result.trend_i = quotient_trend(radii, qi);
  result.trend_ii = quotient_trend(radii, qii);
  result.pass_i = std::isfinite(result.C1_measured) && (small(qi) || result.trend_i <= kTrendLimit);
  result.pass_ii = std::isfinite(result.C2_measured) && (small(qii) || result.trend_ii <= kTrendLimit);
  if (M) {
    const double ball = unit_ball_volume(N);
    result.C1_bound = *M * (std::pow(2.0, N) - 1.0) * ball / (2.0 * K);
    result.C2_bound = holder_C2(*result.C1_bound, N);
    result.pass_i = result.pass_i && result.C1_measured <= *result.C1_bound + zero_floor;
    result.pass_ii = result.pass_ii && result.C2_measured <= *result.C2_bound + zero_floor;
  }
  return result;
}

double holder_replay_bound(double C1, int N, double R) {
  return std::pow(C1 * std::pow(R, N - 2.0), 2.0 / 3.0) * std::cbrt(unit_ball_volume(N) * std::pow(R, N));
}

double holder_C2(double C1, int N) { return std::pow(C1, 2.0 / 3.0) * std::cbrt(unit_ball_volume(N)); }

namespace {

LowerBoundResult summarize_lower_bound(std::vector<double> radii, std::vector<double> q) {
  LowerBoundResult result;
  result.radii = std::move(radii);
  result.quotients = std::move(q);
  const auto& Q = result.quotients;
  double running = -std::numeric_limits<double>::infinity();
  std::vector<double> running_max(Q.size());
  for (std::size_t i = 0; i < Q.size(); ++i) {
    running = std::max(running, Q[i]);
    running_max[i] = running;
  }
  // R0 sits just after the last radius that breaks the half-running-max rule
  std::size_t start = 0;
  for (std::size_t i = 0; i < Q.size(); ++i)
    if (!(Q[i] >= 0.5 * running_max[i]) || !(Q[i] > 0.0)) start = i + 1;
  if (start >= Q.size()) {
    result.c_measured = 0.0;
    result.R0_measured = std::numeric_limits<double>::infinity();
    result.pass = false;
    return result;
  }
  result.R0_measured = result.radii[start];
  result.c_measured = *std::min_element(Q.begin() + static_cast<std::ptrdiff_t>(start), Q.end());
  result.pass = result.c_measured > 0.0;
  return result;
}

void require_lower_bound_radii(std::span<const double> radii) {
  if (radii.size() < 2) throw std::invalid_argument("lower_bound_check: need at least two radii");
  require_ascending(radii, "lower_bound_check");
  if (radii.back() < 4.0 * radii.front())
    throw std::invalid_argument("lower_bound_check: max radius must be at least 4x the min radius");
}

}  // namespace

LowerBoundResult lower_bound_check(const ScalarField& u, std::span<const double> radii, const QuadratureSpec& spec) {
  require_lower_bound_radii(radii);
  const int N = u.dim();
  const ScalarField grad_sq(N, [&](Point x) {
    std::array<double, kMaxDim> grad{};
    u.gradient(x, std::span<double>(grad.data(), N));
    double g2 = 0.0;
    for (int d = 0; d < N; ++d) g2 += grad[d] * grad[d];
    return g2;
  });
  std::vector<double> q;
  for (double R : radii) q.push_back(integrate(grad_sq, Region::ball(N, R), spec).value / std::pow(R, N - 1.0));
  return summarize_lower_bound({radii.begin(), radii.end()}, std::move(q));
}

LowerBoundResult lower_bound_check(std::span<const EnergyLedger> ledgers) {
  std::vector<double> radii, q;
  for (const auto& l : ledgers) {
    radii.push_back(l.R);
    q.push_back(2.0 * l.dirichlet / std::pow(l.R, l.dim - 1.0));
  }
  require_lower_bound_radii(radii);
  return summarize_lower_bound(std::move(radii), std::move(q));
}

}  // namespace liouville
