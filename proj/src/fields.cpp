#include "liouville/fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace liouville {

namespace {

void check_dim(int N) {
  if (N < 1 || N > kMaxDim) throw std::invalid_argument("fields: dimension must be in [1, 8]");
}

void check_point(Point p, int dim) {
  if (static_cast<int>(p.size()) != dim) throw std::invalid_argument("fields: point has wrong dimension");
}

}  // namespace

ScalarField gaussian_H(int N) {
  check_dim(N);
  const int transverse = N - 1;
  if (transverse == 0) return ScalarField(0, [](Point) { return 1.0; }, [](Point, std::span<double>) {});
  const double norm = std::pow(std::numbers::pi, -0.25 * transverse);
  return ScalarField(
      transverse,
      [norm](Point y) {
        double r2 = 0.0;
        for (double v : y) r2 += v * v;
        return norm * std::exp(-0.5 * r2);
      },
      [norm](Point y, std::span<double> out) {
        double r2 = 0.0;
        for (double v : y) r2 += v * v;
        const double h = norm * std::exp(-0.5 * r2);
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = -y[i] * h;
      });
}

Counterexample counterexample(int N, const Profile& profile) {
  check_dim(N);
  const ScalarField H = gaussian_H(N);
  ScalarField phi(
      N,
      [H, profile, N](Point x) { return H(x.first(N - 1)) / std::sqrt(profile.g_prime(x[N - 1])); },
      [H, profile, N](Point x, std::span<double> out) {
        // d/dx_N of 1/sqrt(g') is -g''/(2 g'^{3/2})
        const double t = x[N - 1];
        const double gp = profile.g_prime(t);
        const double gpp = profile.g_second(t);
        const double inv = 1.0 / std::sqrt(gp);
        std::array<double, kMaxDim> dH{};
        H.gradient(x.first(N - 1), std::span<double>(dH.data(), N - 1));
        for (int i = 0; i < N - 1; ++i) out[i] = dH[i] * inv;
        out[N - 1] = -H(x.first(N - 1)) * 0.5 * gpp * inv / gp;
      });
  ScalarField sigma(
      N, [profile, N](Point x) { return profile.g(x[N - 1]); },
      [profile, N](Point x, std::span<double> out) {
        for (int i = 0; i < N - 1; ++i) out[i] = 0.0;
        out[N - 1] = profile.g_prime(x[N - 1]);
      });
  return {std::move(phi), std::move(sigma)};
}

VectorField flux(const ScalarField& phi, const ScalarField& sigma) {
  if (phi.dim() != sigma.dim()) throw std::invalid_argument("flux: phi and sigma dimensions differ");
  const int N = phi.dim();
  return VectorField(N, [phi, sigma, N](Point x, std::span<double> out) {
    const double p = phi(x);
    if (sigma.has_gradient())
      sigma.gradient(x, out);
    else
      fd_gradient(sigma, x, default_step(x), out);
    for (int i = 0; i < N; ++i) out[i] *= p * p;
  });
}

double default_step(Point p) {
  double m = 1.0;
  for (double v : p) m = std::max(m, std::abs(v));
  return 1e-3 * m;
}

double divergence_residual(const VectorField& F, Point p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("divergence_residual: step must be positive");
  const int N = F.dim();
  check_point(p, N);
  std::array<double, kMaxDim> x{};
  std::array<double, kMaxDim> plus{};
  std::array<double, kMaxDim> minus{};
  std::copy(p.begin(), p.end(), x.begin());
  const std::span<double> xs(x.data(), N);
  double div = 0.0;
  for (int i = 0; i < N; ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    F(xs, std::span<double>(plus.data(), N));
    x[i] = xi - h;
    F(xs, std::span<double>(minus.data(), N));
    x[i] = xi;
    div += (plus[i] - minus[i]) / (2.0 * h);
  }
  return div;
}

double hard_divergence_residual(const ScalarField& phi, const ScalarField& sigma, Point p, double h) {
  if (phi.dim() != sigma.dim()) throw std::invalid_argument("hard_divergence_residual: dimension mismatch");
  const int N = phi.dim();
  // Flux component i from evaluations only.
  auto component = [&](std::span<double> x, int i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double sp = sigma(x);
    x[i] = xi - h;
    const double sm = sigma(x);
    x[i] = xi;
    const double f = phi(x);
    return f * f * (sp - sm) / (2.0 * h);
  };
  std::array<double, kMaxDim> x{};
  std::copy(p.begin(), p.end(), x.begin());
  const std::span<double> xs(x.data(), N);
  double div = 0.0;
  for (int i = 0; i < N; ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = component(xs, i);
    x[i] = xi - h;
    const double fm = component(xs, i);
    x[i] = xi;
    div += (fp - fm) / (2.0 * h);
  }
  return div;
}

DivergenceCertificate certify_divergence(const Counterexample& fields, const SampleSet& points, double h, bool hard) {
  if (points.dim != fields.phi.dim()) throw std::invalid_argument("certify_divergence: dimension mismatch");
  const VectorField F = flux(fields.phi, fields.sigma);
  auto residual = [&](Point p, double step) {
    return hard ? hard_divergence_residual(fields.phi, fields.sigma, p, step) : divergence_residual(F, p, step);
  };
  DivergenceCertificate cert;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cert.max_residual = std::max(cert.max_residual, std::abs(residual(points[i], h)));
    cert.max_residual_half = std::max(cert.max_residual_half, std::abs(residual(points[i], 0.5 * h)));
  }
  cert.order = richardson_order(cert.max_residual, cert.max_residual_half);
  return cert;
}

double richardson_order(double residual_h, double residual_half_h) {
  return std::log2(std::abs(residual_h) / std::abs(residual_half_h));
}

void fd_gradient(const ScalarField& f, Point p, double h, std::span<double> out) {
  const int N = f.dim();
  check_point(p, N);
  std::array<double, kMaxDim> x{};
  std::copy(p.begin(), p.end(), x.begin());
  const std::span<double> xs(x.data(), N);
  for (int i = 0; i < N; ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(xs);
    x[i] = xi - h;
    const double fm = f(xs);
    x[i] = xi;
    out[i] = (fp - fm) / (2.0 * h);
  }
}

double laplacian_fd(const ScalarField& f, Point p, double h) {
  const int N = f.dim();
  check_point(p, N);
  std::array<double, kMaxDim> x{};
  std::copy(p.begin(), p.end(), x.begin());
  const std::span<double> xs(x.data(), N);
  const double center = f(xs);
  double lap = 0.0;
  for (int i = 0; i < N; ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(xs);
    x[i] = xi - h;
    const double fm = f(xs);
    x[i] = xi;
    lap += (fp - 2.0 * center + fm) / (h * h);
  }
  return lap;
}

double gradient_fd_order(const ScalarField& f, Point p, double h) {
  const int N = f.dim();
  std::array<double, kMaxDim> exact{}, coarse{}, fine{};
  f.gradient(p, std::span<double>(exact.data(), N));
  fd_gradient(f, p, h, std::span<double>(coarse.data(), N));
  fd_gradient(f, p, 0.5 * h, std::span<double>(fine.data(), N));
  double e1 = 0.0;
  double e2 = 0.0;
  for (int i = 0; i < N; ++i) {
    e1 = std::max(e1, std::abs(coarse[i] - exact[i]));
    e2 = std::max(e2, std::abs(fine[i] - exact[i]));
  }
  return richardson_order(e1, e2);
}

ScalarField lift_1d(const OneDimSolution& solution, int N) {
  check_dim(N);
  return ScalarField(
      N, [u = solution.u, N](Point x) { return u(x[N - 1]); },
      [du = solution.du, N](Point x, std::span<double> out) {
        for (int i = 0; i < N - 1; ++i) out[i] = 0.0;
        out[N - 1] = du(x[N - 1]);
      });
}

ScalarField constant_field(int N, double c) {
  check_dim(N);
  return ScalarField(
      N, [c](Point) { return c; },
      [N](Point, std::span<double> out) {
        for (int i = 0; i < N; ++i) out[i] = 0.0;
      });
}

SampleSet random_ball_points(int N, std::size_t count, double radius, std::uint64_t seed) {
  check_dim(N);
  if (!(radius > 0.0)) throw std::invalid_argument("random_ball_points: radius must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-radius, radius);
  SampleSet set{N, {}};
  set.coords.reserve(count * N);
  std::array<double, kMaxDim> x{};
  // rejection sampling from the bounding cube
  while (set.size() < count) {
    double r2 = 0.0;
    for (int i = 0; i < N; ++i) {
      x[i] = uniform(rng);
      r2 += x[i] * x[i];
    }
    if (r2 < radius * radius) set.coords.insert(set.coords.end(), x.begin(), x.begin() + N);
  }
  return set;
}

}  // namespace liouville
