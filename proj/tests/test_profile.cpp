#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "liouville/profile.hpp"

using namespace liouville;

namespace {

// Composite Simpson on [a, b]; independent of the library quadrature.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double oracle_gp(double t, double k, double A) {
  const double b = std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  return (k - 2.0) * std::pow(t * t + A * b, 0.5 * (1.0 - k));
}

// Plain bisection in log A on the Simpson bridge integral.
double oracle_amplitude(double k) {
  double lo = std::log(1e-6), hi = std::log(1e6);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double I = simpson([&](double t) { return oracle_gp(t, k, std::exp(mid)); }, 0.0, 1.0, 20000);
    (I > 1.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

// mpmath values at 30 digits.
struct Frozen {
  double k, amplitude, C2, g_half;
};
constexpr Frozen kFrozen[] = {
    {2.5, 0.62701333410847001, 2.5477625248928407, 0.64126790573761278},
    {3.0, 3.0631551327625423, 5.4400877476403249, 0.45104414987647534},
    {4.0, 7.3071171295721943, 10.4325896200736, 0.25024675951818186},
};

}  // namespace

TEST_CASE("bump values") {
  CHECK(bump(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.0) == 0.0);
  CHECK(bump(0.5) == doctest::Approx(0.2635971381157267).epsilon(1e-14));
  CHECK(bump(0.3) == bump(-0.3));
  CHECK(bump(2.0) == 0.0);
  // flat at the support edge
  CHECK(bump(1.0 - 1e-3) < 1e-200);
}

TEST_CASE("g_prime closed forms") {
  CHECK(g_prime(2.0, 3.0, 0.7) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g_prime(2.0, 3.0, 123.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g_prime(1.0, 3.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g_prime(0.0, 4.0, 1.0) == doctest::Approx(2.0 * std::exp(1.5)).epsilon(1e-14));
  CHECK(g_prime(-0.4, 3.5, 2.0) == g_prime(0.4, 3.5, 2.0));
  CHECK_THROWS_AS(g_prime(0.5, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(g_prime(0.5, 3.0, 0.0), std::invalid_argument);
}

TEST_CASE("g_second matches differences of g_prime") {
  for (double t : {-3.0, -0.8, -0.2, 0.0, 0.35, 0.9, 1.5, 7.0}) {
    const double h = 1e-5;
    const double fd = (g_prime(t + h, 3.0, 2.0) - g_prime(t - h, 3.0, 2.0)) / (2.0 * h);
    CHECK(g_second(t, 3.0, 2.0) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("bridge integral decreases in the amplitude") {
  const QuadratureSpec spec;
  const double a = bridge_integral(3.0, 0.5, spec).value;
  const double b = bridge_integral(3.0, 2.0, spec).value;
  CHECK(a > b);
}

TEST_CASE("amplitude against the Simpson oracle and frozen values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.k);
    const double A = solve_bridge_amplitude(f.k, 1e-10);
    CHECK(A == doctest::Approx(oracle_amplitude(f.k)).epsilon(1e-8));
    CHECK(A == doctest::Approx(f.amplitude).epsilon(1e-8));
    const double I = simpson([&](double t) { return oracle_gp(t, f.k, A); }, 0.0, 1.0, 20000);
    CHECK(std::abs(I - 1.0) <= 1e-10);
  }
  CHECK(solve_bridge_amplitude(2.5, 1e-10) != solve_bridge_amplitude(4.0, 1e-10));
}

TEST_CASE("amplitude solver rejects inadmissible k") {
  CHECK_THROWS_AS(solve_bridge_amplitude(2.0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(solve_bridge_amplitude(1.5, 1e-10), std::invalid_argument);
  try {
    require_admissible_k(2.0);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("k > 2") != std::string::npos);
  }
}

TEST_CASE("amplitude solver reports an unreachable bracket") {
  ProfileOptions narrow;
  narrow.bracket_min = 1e-3;
  narrow.bracket_max = 1e-2;
  narrow.bracket_lo = 1e-3;
  narrow.bracket_hi = 1e-2;
  CHECK_THROWS_AS(solve_bridge_amplitude(3.0, 1e-10, narrow), std::runtime_error);
}

TEST_CASE("profile invariants") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.k);
    const Profile p = Profile::build(f.k);
    CHECK(std::abs(p.bridge_residual()) <= 1e-10);
    CHECK(p.g(0.0) == 0.0);
    CHECK(p.g(1.0) == 1.0);
    CHECK(p.g(0.5) == doctest::Approx(f.g_half).epsilon(1e-9));
    CHECK(p.C1() == doctest::Approx(8.0 / (f.k * (f.k - 2.0))).epsilon(1e-15));
    CHECK(p.C2() == doctest::Approx(f.C2).epsilon(1e-8));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-100.0, 100.0);
    double odd = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = U(rng);
      odd = std::max(odd, std::abs(p.g(t) + p.g(-t)));
    }
    CHECK(odd <= 1e-12);

    double tail = 0.0;
    for (double t = 1.0; t < 1000.0; t *= 1.37) tail = std::max(tail, std::abs(p.g(t) - (2.0 - std::pow(t, 2.0 - f.k))));
    CHECK(tail <= 1e-13);

    double prev = -2.0;
    for (int i = -4000; i <= 4000; ++i) {
      const double t = i * 2.5e-3;
      CHECK(p.g_prime(t) > 0.0);
      const double g = p.g(t);
      CHECK(g > prev);
      prev = g;
    }
    for (double t : {5.0, 50.0, 500.0}) {
      CHECK(std::abs(p.g(t)) < 2.0);
      CHECK(p.g(t) > p.g(t / 10.0));
    }
  }
}

TEST_CASE("profile g agrees with integrating g_prime") {
  const Profile p = Profile::build(3.0);
  for (double t : {0.1, 0.37, 0.8, 0.999}) {
    const double I = simpson([&](double s) { return p.g_prime(s); }, 0.0, t, 20000);
    CHECK(p.g(t) == doctest::Approx(I).epsilon(1e-9));
  }
}

TEST_CASE("slab bound closed form beyond the bridge") {
  const Profile p = Profile::build(4.0);
  // 8 int_0^R dt/g' = C2 + C1 R^k
  CHECK(p.slab_bound(2.0) == doctest::Approx(p.C1() * 16.0 + p.C2()).epsilon(1e-13));
  CHECK(p.slab_bound(2.0) - p.slab_bound(1.0) == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("Allen-Cahn potential") {
  const Potential G = allen_cahn_potential();
  CHECK(G.G(0.0) == 0.25);
  CHECK(G.G(1.0) == 0.0);
  CHECK(G.G(-1.0) == 0.0);
  CHECK(G.d2G(0.0) == -1.0);
  for (double s : {-0.9, 0.0, 0.9}) CHECK(-G.sqrt_second(s) == doctest::Approx(1.0));
  CHECK_THROWS_AS(G.sqrt_second(1.0), std::domain_error);
  CHECK_THROWS_AS(G.sqrt_second(-1.5), std::domain_error);
  CHECK_THROWS_AS(G.sqrt_first(1.0), std::domain_error);
  CHECK(G.sqrt_first(0.3) == doctest::Approx(-0.3).epsilon(1e-12));

  for (double s : {-0.7, 0.2, 0.55}) {
    auto fd = [&](double h) { return (G.G(s + h) - 2.0 * G.G(s) + G.G(s - h)) / (h * h); };
    const double e1 = std::abs(fd(1e-2) - G.d2G(s));
    const double e2 = std::abs(fd(5e-3) - G.d2G(s));
    CHECK(std::log2(e1 / e2) >= 1.9);
    const double d1 = (G.G(s + 1e-6) - G.G(s - 1e-6)) / 2e-6;
    CHECK(G.dG(s) == doctest::Approx(d1).epsilon(1e-8));
  }
}

TEST_CASE("hypothesis (H) constant") {
  const Potential G = allen_cahn_potential();
  auto H = hypothesis_H_constant(G, {-0.99, 0.99}, 101);
  REQUIRE(H);
  CHECK(H->K == doctest::Approx(1.0).epsilon(1e-12));
  auto single = hypothesis_H_constant(G, {0.0, 0.0}, 1);
  REQUIRE(single);
  CHECK(single->K == doctest::Approx(1.0).epsilon(1e-12));

  const Potential quartic("quartic", [](double s) { return s * s * s * s; }, [](double s) { return 4 * s * s * s; },
                          [](double s) { return 12 * s * s; }, [](double) { return 2.0; }, {0.0, 10.0});
  CHECK_FALSE(hypothesis_H_constant(quartic, {0.1, 0.9}, 50).has_value());
  CHECK_THROWS_AS(hypothesis_H_constant(G, {-2.0, 0.5}, 10), std::invalid_argument);
}

TEST_CASE("kink solves the 1D equation with Modica equality") {
  const auto u = kink();
  const Potential G = allen_cahn_potential();
  CHECK(u.u(0.0) == 0.0);
  for (double x : {-3.0, 0.7, 5.0}) {
    // u'' from the closed form of u' = (1 - u^2)/sqrt2: u'' = -sqrt2 u u'
    const double upp = -std::numbers::sqrt2 * u.u(x) * u.du(x);
    CHECK(std::abs(upp - G.dG(u.u(x))) <= 1e-10);
    const double h = 1e-4;
    const double fd = (u.u(x + h) - 2.0 * u.u(x) + u.u(x - h)) / (h * h);
    CHECK(std::abs(fd - G.dG(u.u(x))) <= 1e-7);
  }
  double worst = 0.0;
  for (int i = -1000; i <= 1000; ++i) {
    const double x = i * 0.01;
    worst = std::max(worst, std::abs(0.5 * u.du(x) * u.du(x) - G.G(u.u(x))));
  }
  CHECK(worst <= 1e-12);
}
