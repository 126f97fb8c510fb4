#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "liouville/fields.hpp"
#include "liouville/quadrature.hpp"

using namespace liouville;

namespace {

constexpr double kPi = std::numbers::pi;

template <std::size_t N>
Point pt(const std::array<double, N>& a) {
  return Point(a.data(), N);
}

}  // namespace

TEST_CASE("transverse Gaussian") {
  const ScalarField H2 = gaussian_H(2);
  const auto norm = integrate_interval(
      [&](double y) {
        const std::array<double, 1> p{y};
        return H2(pt(p)) * H2(pt(p));
      },
      -40.0, 40.0, QuadratureSpec{});
  CHECK(std::abs(norm.value - 1.0) <= 1e-10);

  const ScalarField H1 = gaussian_H(1);
  CHECK(H1.dim() == 0);
  CHECK(H1(Point{}) == 1.0);

  const ScalarField H3 = gaussian_H(3);
  CHECK(H3(pt(std::array<double, 2>{0.0, 0.0})) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-15));
  // integral of H^2 over R^2 by polar quadrature of the disk of radius 12
  const ScalarField H3sq(2, [&](Point y) { return H3(y) * H3(y); });
  CHECK(integrate(H3sq, Region::ball(2, 12.0), QuadratureSpec{}).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("counterexample fields") {
  const Profile p3 = Profile::build(3.0);
  const Counterexample c1 = counterexample(1, p3);
  const double phi2 = c1.phi(pt(std::array<double, 1>{2.0}));
  CHECK(phi2 * phi2 == doctest::Approx(4.0).epsilon(1e-14));

  for (int N : {1, 2, 3}) {
    const Counterexample c = counterexample(N, p3);
    std::array<double, 3> x{0.4, -1.1, 2.0};
    x[N - 1] = 0.0;
    CHECK(c.sigma(Point(x.data(), N)) == 0.0);
    std::array<double, 3> plus{}, minus{};
    plus[N - 1] = 1.0;
    minus[N - 1] = -1.0;
    CHECK(c.sigma(Point(plus.data(), N)) != c.sigma(Point(minus.data(), N)));
  }

  const Counterexample c2 = counterexample(2, p3);
  CHECK(c2.phi(pt(std::array<double, 2>{0.0, 1.0})) == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  const Counterexample c3 = counterexample(3, Profile::build(4.0));
  for (int i = 0; i < 1000; ++i) {
    const std::array<double, 3> x{U(rng) / 5.0, U(rng) / 5.0, U(rng)};
    CHECK(c3.phi(pt(x)) > 0.0);
  }
}

TEST_CASE("flux is independent of the last coordinate") {
  const Profile p3 = Profile::build(3.0);
  {
    const VectorField F = flux(counterexample(2, p3).phi, counterexample(2, p3).sigma);
    std::array<double, 2> out{};
    F(pt(std::array<double, 2>{0.0, 17.0}), out);
    CHECK(std::abs(out[0]) <= 1e-15);
    CHECK(out[1] == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-13));
  }
  {
    const Counterexample c = counterexample(1, p3);
    const VectorField F = flux(c.phi, c.sigma);
    for (double x : {-30.0, -0.5, 0.0, 0.3, 4.0}) {
      std::array<double, 1> out{};
      F(pt(std::array<double, 1>{x}), out);
      CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  for (double k : {2.5, 3.0, 4.0}) {
    const Counterexample c = counterexample(3, Profile::build(k));
    const VectorField F = flux(c.phi, c.sigma);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double y0 = U(rng) / 3.0, y1 = U(rng) / 3.0;
      std::array<double, 3> a{}, b{};
      F(pt(std::array<double, 3>{y0, y1, U(rng)}), a);
      F(pt(std::array<double, 3>{y0, y1, U(rng)}), b);
      for (int d = 0; d < 3; ++d) worst = std::max(worst, std::abs(a[d] - b[d]));
    }
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("flux falls back to differences without a gradient") {
  const ScalarField phi = constant_field(2, 2.0);
  const ScalarField sigma(2, [](Point x) { return x[0] * x[0] + 3.0 * x[1]; });
  const VectorField F = flux(phi, sigma);
  std::array<double, 2> out{};
  F(pt(std::array<double, 2>{1.5, 0.0}), out);
  CHECK(out[0] == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(out[1] == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("divergence residual") {
  const Profile p3 = Profile::build(3.0);
  const Counterexample c = counterexample(2, p3);
  const std::array<double, 2> p{0.3, 1.7};
  CHECK(std::abs(divergence_residual(flux(c.phi, c.sigma), pt(p), 1e-3)) <= 1e-8);

  const VectorField identity(3, [](Point x, std::span<double> out) {
    for (int i = 0; i < 3; ++i) out[i] = x[i];
  });
  CHECK(divergence_residual(identity, pt(std::array<double, 3>{0.2, -4.0, 9.0}), 1e-3) ==
        doctest::Approx(3.0).epsilon(1e-10));

  // non-solenoidal field, div = cos x1 + 3 x1^2 x2^2
  const VectorField F(2, [](Point x, std::span<double> out) {
    out[0] = std::sin(x[0]);
    out[1] = x[0] * x[0] * x[1] * x[1] * x[1];
  });
  const std::array<double, 2> q{0.7, 1.3};
  const double exact = std::cos(0.7) + 3.0 * 0.49 * 1.69;
  const double e1 = divergence_residual(F, pt(q), 1e-2) - exact;
  const double e2 = divergence_residual(F, pt(q), 5e-3) - exact;
  CHECK(richardson_order(e1, e2) >= 1.9);
  CHECK_THROWS_AS(divergence_residual(F, pt(q), 0.0), std::invalid_argument);
}

TEST_CASE("counterexample flux is divergence free on B_10") {
  for (double k : {2.5, 3.0, 4.0}) {
    const Profile p = Profile::build(k);
    for (int N : {1, 2, 3}) {
      CAPTURE(k);
      CAPTURE(N);
      const SampleSet points = random_ball_points(N, 1000, 10.0, 99);
      const DivergenceCertificate cert = certify_divergence(counterexample(N, p), points, 1e-3, false);
      CHECK(cert.max_residual <= 1e-8);
    }
  }
}

TEST_CASE("nested differences converge at second order") {
  for (double k : {2.5, 3.0, 4.0}) {
    const Counterexample c = counterexample(2, Profile::build(k));
    const SampleSet points = random_ball_points(2, 200, 10.0, 5);
    const DivergenceCertificate cert = certify_divergence(c, points, 1e-3, true);
    CHECK(cert.max_residual > 0.0);
    CHECK(cert.order >= 1.9);
  }
}

TEST_CASE("analytic gradients match differences") {
  // for k = 3 phi is linear in the tail and differences are exact
  const Profile p = Profile::build(2.5);
  for (int N : {1, 2, 3}) {
    const Counterexample c = counterexample(N, p);
    const ScalarField u = lift_1d(kink(), N);
    for (double t : {-2.3, -0.6, 0.45, 1.7}) {
      std::array<double, 3> x{0.3, -0.8, 0.0};
      x[N - 1] = t;
      const Point px(x.data(), N);
      CHECK(gradient_fd_order(c.phi, px, 1e-2) >= 1.9);
      CHECK(gradient_fd_order(c.sigma, px, 1e-2) >= 1.9);
      CHECK(gradient_fd_order(u, px, 1e-2) >= 1.9);
    }
  }
  const ScalarField H3 = gaussian_H(3);
  CHECK(gradient_fd_order(H3, pt(std::array<double, 2>{0.4, -1.2}), 1e-2) >= 1.9);
}

TEST_CASE("lifted kink") {
  const ScalarField U = lift_1d(kink(), 3);
  CHECK(U(pt(std::array<double, 3>{5.0, -2.0, 0.0})) == 0.0);
  const auto k = kink();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> V(-5.0, 5.0);
  const Potential G = allen_cahn_potential();
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 3> x{V(rng), V(rng), V(rng)};
    std::array<double, 3> g{};
    U.gradient(pt(x), g);
    CHECK(std::hypot(g[0], g[1], g[2]) == doctest::Approx(std::abs(k.du(x[2]))).epsilon(1e-15));
    // Richardson-combined Laplacian against G'(U)
    const double h = 1e-3;
    const double lap = (4.0 * laplacian_fd(U, pt(x), 0.5 * h) - laplacian_fd(U, pt(x), h)) / 3.0;
    CHECK(std::abs(lap - G.dG(U(pt(x)))) <= 1e-8);
  }
}

TEST_CASE("constant field and sample sets") {
  const ScalarField c = constant_field(2, 0.5);
  std::array<double, 2> g{1.0, 1.0};
  c.gradient(pt(std::array<double, 2>{3.0, 4.0}), g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);

  const SampleSet a = random_ball_points(3, 500, 2.0, 1);
  const SampleSet b = random_ball_points(3, 500, 2.0, 1);
  const SampleSet d = random_ball_points(3, 500, 2.0, 2);
  CHECK(a.size() == 500);
  CHECK(a.coords == b.coords);
  CHECK(a.coords != d.coords);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point p = a[i];
    CHECK(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < 4.0);
  }
  CHECK_THROWS_AS(random_ball_points(9, 1, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_H(0), std::invalid_argument);
}
