#include "liouville/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "liouville/fields.hpp"

namespace liouville {

namespace {

double norm(Point x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::sqrt(r2);
}

double cutoff_value(double r, double R) {
  if (r <= R) return 1.0;
  if (r <= 2.0 * R) return 2.0 - r / R;
  return 0.0;
}

// Gradient of the radial cutoff; zero on the (measure-zero) breakpoints.
void cutoff_gradient(Point x, double R, std::span<double> out) {
  const double r = norm(x);
  const bool annulus = r > R && r < 2.0 * R;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = annulus ? -x[i] / (R * r) : 0.0;
}

void gradient_of(const ScalarField& f, Point x, std::span<double> out) {
  if (f.has_gradient())
    f.gradient(x, out);
  else
    fd_gradient(f, x, default_step(x), out);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_ball_dim(int N, const char* who) {
  if (N < 1 || N > 3) throw std::invalid_argument(std::string(who) + ": requires N <= 3");
}

// Smooth factor s(x) with gradient, multiplied by the cutoff of radius rho.
struct Smooth {
  std::function<double(Point)> value;
  std::function<void(Point, std::span<double>)> gradient;
};

TestFunction cutoff_times(double rho, int N, Smooth smooth, std::string kind) {
  auto s = std::make_shared<const Smooth>(std::move(smooth));
  ScalarField field(
      N, [s, rho](Point x) { return cutoff_value(norm(x), rho) * s->value(x); },
      [s, rho, N](Point x, std::span<double> out) {
        std::array<double, kMaxDim> dc{}, ds{};
        cutoff_gradient(x, rho, std::span<double>(dc.data(), N));
        s->gradient(x, std::span<double>(ds.data(), N));
        const double c = cutoff_value(norm(x), rho);
        const double v = s->value(x);
        for (int i = 0; i < N; ++i) out[i] = dc[i] * v + c * ds[i];
      });
  return {std::move(field), 2.0 * rho, {rho, 2.0 * rho}, std::move(kind)};
}

}  // namespace

double quadratic_form_Q(const ScalarField& u, const Potential& G, const TestFunction& v, const QuadratureSpec& spec) {
  const int N = u.dim();
  require_ball_dim(N, "quadratic_form_Q");
  if (v.field.dim() != N) throw std::invalid_argument("quadratic_form_Q: dimension mismatch");
  PointIntegrand integrand = [&](Point x, std::span<double> out) {
    std::array<double, kMaxDim> grad{};
    gradient_of(v.field, x, std::span<double>(grad.data(), N));
    const double value = v.field(x);
    const std::span<const double> g(grad.data(), N);
    out[0] = dot(g, g) + G.d2G(u(x)) * value * value;
  };
  return integrate_region(integrand, 1, Region::ball(N, v.support_radius), spec, v.radial_breaks).value[0];
}

IdentityTerms lemma_identity(const ScalarField& u, const Potential& G, const TestFunction& mu,
                             const QuadratureSpec& spec, RhsMutation mutation) {
  const int N = u.dim();
  require_ball_dim(N, "lemma_identity");
  if (mu.field.dim() != N) throw std::invalid_argument("lemma_identity: dimension mismatch");
  PointIntegrand integrand = [&](Point x, std::span<double> out) {
    std::array<double, kMaxDim> du{}, dmu{}, dw{};
    gradient_of(u, x, std::span<double>(du.data(), N));
    gradient_of(mu.field, x, std::span<double>(dmu.data(), N));
    const double s = u(x);
    const double m = mu.field(x);
    const double g = G.G(s);
    const double root = std::sqrt(g);
    const double root_d1 = G.sqrt_first(s);
    const double root_d2 = G.sqrt_second(s);
    // w = sqrt(G(u)) mu
    for (int i = 0; i < N; ++i) dw[i] = root_d1 * du[i] * m + root * dmu[i];
    const double w = root * m;
    const std::span<const double> gw(dw.data(), N), gu(du.data(), N), gm(dmu.data(), N);
    out[0] = dot(gw, gw) + G.d2G(s) * w * w;

    const double half_grad = 0.5 * dot(gu, gu);
    double deficit = g - half_grad;
    if (mutation == RhsMutation::flip_deficit_sign) deficit = g + half_grad;
    out[1] = g * dot(gm, gm);
    if (mutation != RhsMutation::drop_deficit_term) out[1] += 2.0 * deficit * root_d2 * root * m * m;
  };
  const MultiResult r = integrate_region(integrand, 2, Region::ball(N, mu.support_radius), spec, mu.radial_breaks);
  IdentityTerms terms;
  terms.lhs = r.value[0];
  terms.rhs = r.value[1];
  terms.gap = std::abs(terms.lhs - terms.rhs) / (std::abs(terms.lhs) + std::abs(terms.rhs) + 1.0);
  return terms;
}

double lemma_identity_gap(const ScalarField& u, const Potential& G, const TestFunction& mu,
                          const QuadratureSpec& spec, RhsMutation mutation) {
  return lemma_identity(u, G, mu, spec, mutation).gap;
}

StabilityInequality stability_inequality(const ScalarField& u, const Potential& G, const TestFunction& mu,
                                         const QuadratureSpec& spec) {
  const int N = u.dim();
  require_ball_dim(N, "stability_inequality");
  PointIntegrand integrand = [&](Point x, std::span<double> out) {
    std::array<double, kMaxDim> du{}, dmu{};
    gradient_of(u, x, std::span<double>(du.data(), N));
    gradient_of(mu.field, x, std::span<double>(dmu.data(), N));
    const double s = u(x);
    const double m = mu.field(x);
    const double g = G.G(s);
    const std::span<const double> gu(du.data(), N), gm(dmu.data(), N);
    out[0] = g * dot(gm, gm);
    out[1] = (g - 0.5 * dot(gu, gu)) * (-2.0 * G.sqrt_second(s)) * std::sqrt(g) * m * m;
  };
  const MultiResult r = integrate_region(integrand, 2, Region::ball(N, mu.support_radius), spec, mu.radial_breaks);
  return {r.value[0], r.value[1], r.value[0] - r.value[1]};
}

bool stability_equivalence_check(const ScalarField& u, const Potential& G, const std::vector<TestFunction>& mus,
                                 const QuadratureSpec& spec, double slack) {
  return std::all_of(mus.begin(), mus.end(),
                     [&](const TestFunction& mu) { return stability_inequality(u, G, mu, spec).slack >= -slack; });
}

TestFunction radial_cutoff(double R, int N) {
  if (!(R > 0.0)) throw std::invalid_argument("radial_cutoff: R must be positive");
  if (N < 1 || N > kMaxDim) throw std::invalid_argument("radial_cutoff: dimension out of range");
  ScalarField field(
      N, [R](Point x) { return cutoff_value(norm(x), R); },
      [R](Point x, std::span<double> out) { cutoff_gradient(x, R, out); });
  return {std::move(field), 2.0 * R, {R, 2.0 * R}, "radial_cutoff"};
}

std::vector<TestFunction> random_test_functions(int N, std::size_t count, std::uint64_t seed) {
  if (N < 1 || N > 3) throw std::invalid_argument("random_test_functions: requires N <= 3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };

  std::vector<TestFunction> corpus;
  corpus.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double rho = uniform(1.0, 4.0);
    if (n % 2 == 0) {
      // 1 + sum_j a_j cos(omega_j . x + phase_j), two modes
      struct Mode {
        double amplitude;
        double phase;
        std::array<double, kMaxDim> omega;
      };
      std::vector<Mode> modes(2);
      for (auto& m : modes) {
        m.amplitude = uniform(-0.5, 0.5);
        m.phase = uniform(0.0, 2.0 * std::numbers::pi);
        m.omega = {};
        for (int i = 0; i < N; ++i) m.omega[i] = uniform(-1.5, 1.5);
      }
      const double offset = uniform(0.5, 1.5);
      Smooth smooth{[modes, offset, N](Point x) {
                      double v = offset;
                      for (const auto& m : modes)
                        v += m.amplitude * std::cos(dot(std::span<const double>(m.omega.data(), N), x) + m.phase);
                      return v;
                    },
                    [modes, N](Point x, std::span<double> out) {
                      for (int i = 0; i < N; ++i) out[i] = 0.0;
                      for (const auto& m : modes) {
                        const double s =
                            -m.amplitude * std::sin(dot(std::span<const double>(m.omega.data(), N), x) + m.phase);
                        for (int i = 0; i < N; ++i) out[i] += s * m.omega[i];
                      }
                    }};
      corpus.push_back(cutoff_times(rho, N, std::move(smooth), "cutoff_trig"));
    } else {
      std::array<double, kMaxDim> center{};
      double c2;
      do {
        c2 = 0.0;
        for (int i = 0; i < N; ++i) {
          center[i] = uniform(-rho, rho);
          c2 += center[i] * center[i];
        }
      } while (c2 >= rho * rho);
      const double width = uniform(0.7, 2.0);
      const double inv_w2 = 1.0 / (width * width);
      Smooth smooth{[center, inv_w2, N](Point x) {
                      double d2 = 0.0;
                      for (int i = 0; i < N; ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
                      return std::exp(-d2 * inv_w2);
                    },
                    [center, inv_w2, N](Point x, std::span<double> out) {
                      double d2 = 0.0;
                      for (int i = 0; i < N; ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
                      const double e = std::exp(-d2 * inv_w2);
                      for (int i = 0; i < N; ++i) out[i] = -2.0 * (x[i] - center[i]) * inv_w2 * e;
                    }};
      corpus.push_back(cutoff_times(rho, N, std::move(smooth), "cutoff_gaussian"));
    }
  }
  return corpus;
}

double sample_potential_sup(const ScalarField& u, const Potential& G, double radius) {
  const int N = u.dim();
  require_ball_dim(N, "sample_potential_sup");
  constexpr int kRadial = 64;
  constexpr int kAngular = 64;
  std::array<double, 3> x{};
  const std::span<const double> xs(x.data(), N);
  double sup = G.G(u(xs));  // origin
  for (int i = 1; i <= kRadial; ++i) {
    const double r = radius * i / kRadial;
    if (N == 1) {
      x[0] = r;
      sup = std::max(sup, G.G(u(xs)));
      x[0] = -r;
      sup = std::max(sup, G.G(u(xs)));
      continue;
    }
    for (int a = 0; a < kAngular; ++a) {
      const double theta = (N == 2 ? 2.0 : 1.0) * std::numbers::pi * a / (N == 2 ? kAngular : kAngular - 1);
      if (N == 2) {
        x = {r * std::sin(theta), r * std::cos(theta), 0.0};
        sup = std::max(sup, G.G(u(xs)));
      } else {
        for (int b = 0; b < kAngular; ++b) {
          const double psi = 2.0 * std::numbers::pi * b / kAngular;
          x = {r * std::sin(theta) * std::cos(psi), r * std::sin(theta) * std::sin(psi), r * std::cos(theta)};
          sup = std::max(sup, G.G(u(xs)));
        }
      }
    }
  }
  return sup;
}

CutoffReplay cutoff_bound_replay(const ScalarField& u, const Potential& G, double R, double K,
                                 const QuadratureSpec& spec, std::optional<double> M) {
  const int N = u.dim();
  require_ball_dim(N, "cutoff_bound_replay");
  if (!(R > 0.0)) throw std::invalid_argument("cutoff_bound_replay: R must be positive");
  CutoffReplay replay;
  replay.M = M ? *M : sample_potential_sup(u, G, 2.0 * R);

  PointIntegrand annulus_integrand = [&](Point x, std::span<double> out) { out[0] = G.G(u(x)) / (R * R); };
  replay.lhs = integrate_region(annulus_integrand, 1, Region::annulus(N, R, 2.0 * R), spec).value[0];
  replay.rhs = replay.M * (std::pow(2.0, N) - 1.0) * unit_ball_volume(N) * std::pow(R, N - 2.0);

  PointIntegrand chained_integrand = [&](Point x, std::span<double> out) {
    std::array<double, kMaxDim> du{};
    gradient_of(u, x, std::span<double>(du.data(), N));
    const double g = G.G(u(x));
    const std::span<const double> gu(du.data(), N);
    out[0] = (g - 0.5 * dot(gu, gu)) * std::sqrt(std::max(g, 0.0));
  };
  replay.chained = 2.0 * K * integrate_region(chained_integrand, 1, Region::ball(N, R), spec).value[0];
  return replay;
}

}  // namespace liouville
