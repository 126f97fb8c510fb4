#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "liouville/fields.hpp"
#include "liouville/stability.hpp"

using namespace liouville;

namespace {

TestFunction scaled(const TestFunction& v, double c) {
  TestFunction w = v;
  const ScalarField f = v.field;
  w.field = ScalarField(
      f.dim(), [f, c](Point x) { return c * f(x); },
      [f, c](Point x, std::span<double> out) {
        f.gradient(x, out);
        for (double& g : out) g *= c;
      });
  return w;
}

TestFunction zero_function(int N) {
  TestFunction z;
  z.field = constant_field(N, 0.0);
  z.support_radius = 2.0;
  z.kind = "zero";
  return z;
}

}  // namespace

TEST_CASE("quadratic form basics") {
  const Potential G = allen_cahn_potential();
  const QuadratureSpec spec;
  for (int N : {1, 2}) {
    const ScalarField u = lift_1d(kink(), N);
    CHECK(quadratic_form_Q(u, G, zero_function(N), spec) == 0.0);
    for (const auto& v : random_test_functions(N, 6, 5)) {
      const double q = quadratic_form_Q(u, G, v, spec);
      for (double c : {-2.0, 0.5, 3.0})
        CHECK(std::abs(quadratic_form_Q(u, G, scaled(v, c), spec) - c * c * q) <= 1e-12 * (1.0 + std::abs(q)) * c * c);
    }
  }
}

TEST_CASE("kink is stable and zero is not") {
  const Potential G = allen_cahn_potential();
  const QuadratureSpec spec;
  for (int N : {1, 2}) {
    const ScalarField u = lift_1d(kink(), N);
    double worst = 1e300;
    for (const auto& v : random_test_functions(N, 50, 7)) worst = std::min(worst, quadratic_form_Q(u, G, v, spec));
    CHECK(worst >= -1e-8);

    const double q0 = quadratic_form_Q(constant_field(N, 0.0), G, radial_cutoff(10.0, N), spec);
    CHECK(q0 < 0.0);
  }
  // closed form for u = 0, N = 1: |grad mu|^2 gives 2/R, mu^2 gives 2R + 2R/3
  const double R = 10.0;
  CHECK(quadratic_form_Q(constant_field(1, 0.0), G, radial_cutoff(R, 1), spec) ==
        doctest::Approx(2.0 / R - (2.0 * R + 2.0 * R / 3.0)).epsilon(1e-10));
}

TEST_CASE("stability identity on the kink") {
  const Potential G = allen_cahn_potential();
  const QuadratureSpec spec;
  for (int N : {1, 2}) {
    const ScalarField u = lift_1d(kink(), N);
    double worst = 0.0;
    for (const auto& mu : random_test_functions(N, 20, 42)) worst = std::max(worst, lemma_identity_gap(u, G, mu, spec));
    CHECK(worst <= 1e-6);

    const IdentityTerms z = lemma_identity(u, G, zero_function(N), spec);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.gap == 0.0);

    const TestFunction mu = radial_cutoff(3.0, N);
    const IdentityTerms t = lemma_identity(u, G, mu, spec);
    CHECK(t.gap == doctest::Approx(std::abs(t.lhs - t.rhs) / (std::abs(t.lhs) + std::abs(t.rhs) + 1.0)));
    // the kink has no deficit, so dropping that term cannot be seen
    CHECK(lemma_identity_gap(u, G, mu, spec, RhsMutation::drop_deficit_term) <= 1e-6);
    CHECK(lemma_identity_gap(u, G, mu, spec, RhsMutation::flip_deficit_sign) > 0.1);
  }
}

TEST_CASE("identity rejects fields outside the well") {
  const Potential G = allen_cahn_potential();
  CHECK_THROWS_AS(lemma_identity(constant_field(1, 1.5), G, radial_cutoff(1.0, 1), QuadratureSpec{}), std::domain_error);
}

TEST_CASE("stability inequality") {
  const Potential G = allen_cahn_potential();
  const QuadratureSpec spec;
  const ScalarField u = lift_1d(kink(), 2);
  const auto mus = random_test_functions(2, 10, 3);
  for (const auto& mu : mus) {
    const StabilityInequality s = stability_inequality(u, G, mu, spec);
    CHECK(s.slack == doctest::Approx(s.gradient_side - s.deficit_side));
    CHECK(std::abs(s.deficit_side) <= 1e-9);
    CHECK(s.gradient_side >= 0.0);
  }
  CHECK(stability_equivalence_check(u, G, mus, spec));

  // constant c in the well: the deficit side is 2 G(c)^(3/2) int mu^2 and mu has a flat core
  const ScalarField c = constant_field(1, 0.2);
  const std::vector<TestFunction> wide{radial_cutoff(10.0, 1)};
  CHECK_FALSE(stability_equivalence_check(c, G, wide, spec));
  const StabilityInequality s = stability_inequality(c, G, wide[0], spec);
  const double Gc = G.G(0.2);
  CHECK(s.gradient_side == doctest::Approx(Gc * 2.0 / 10.0).epsilon(1e-10));
  CHECK(s.deficit_side == doctest::Approx(2.0 * Gc * std::sqrt(Gc) * (20.0 + 20.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("radial cutoff") {
  for (int N : {1, 2, 3}) {
    const TestFunction mu = radial_cutoff(2.0, N);
    CHECK(mu.support_radius == 4.0);
    std::array<double, 3> x{};
    auto at = [&](double r) {
      x = {};
      x[0] = r;
      return mu.field(Point(x.data(), N));
    };
    CHECK(at(0.0) == 1.0);
    CHECK(at(1.9) == 1.0);
    CHECK(at(3.0) == doctest::Approx(0.5));
    CHECK(at(4.0) == 0.0);
    CHECK(at(7.0) == 0.0);
    CHECK(std::abs(at(2.0 + 1e-9) - 1.0) <= 1e-9);
    CHECK(std::abs(at(4.0 - 1e-9)) <= 1e-9);

    x = {};
    x[0] = 2.2;
    x[N - 1] += 1.0;
    const double h = 1e-6;
    double norm2 = 0.0;
    for (int d = 0; d < N; ++d) {
      std::array<double, 3> a = x, b = x;
      a[d] += h;
      b[d] -= h;
      const double fd = (mu.field(Point(a.data(), N)) - mu.field(Point(b.data(), N))) / (2.0 * h);
      norm2 += fd * fd;
    }
    const double r = std::sqrt(std::inner_product(x.begin(), x.begin() + N, x.begin(), 0.0));
    if (r > 2.0 && r < 4.0) CHECK(std::sqrt(norm2) == doctest::Approx(0.5).epsilon(1e-6));
  }
  CHECK_THROWS_AS(radial_cutoff(0.0, 2), std::invalid_argument);
}

TEST_CASE("random corpus") {
  const auto a = random_test_functions(2, 20, 9);
  const auto b = random_test_functions(2, 20, 9);
  REQUIRE(a.size() == 20);
  std::array<double, 2> x{0.3, -0.4};
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].support_radius <= 8.0);
    CHECK(a[i].field(Point(x.data(), 2)) == b[i].field(Point(x.data(), 2)));
    std::array<double, 2> far{a[i].support_radius + 0.01, 0.0};
    CHECK(a[i].field(Point(far.data(), 2)) == 0.0);
  }
  CHECK(a[0].kind != a[1].kind);
}

TEST_CASE("cutoff bound replay") {
  const Potential G = allen_cahn_potential();
  const QuadratureSpec spec;
  const double c = 0.4;
  for (int N : {1, 2}) {
    const CutoffReplay r = cutoff_bound_replay(constant_field(N, c), G, 3.0, 1.0, spec);
    CHECK(r.M == doctest::Approx(G.G(c)).epsilon(1e-15));
    CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-10));
  }
  const CutoffReplay k = cutoff_bound_replay(lift_1d(kink(), 2), G, 10.0, 1.0, spec);
  CHECK(k.M == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(k.lhs < k.rhs);
  CHECK(std::abs(k.chained) <= 1e-9);

  const CutoffReplay given = cutoff_bound_replay(lift_1d(kink(), 2), G, 10.0, 1.0, spec, 1.0);
  CHECK(given.M == 1.0);
  CHECK(given.rhs == doctest::Approx(4.0 * k.rhs));
}

TEST_CASE("potential sup sampling") {
  const Potential G = allen_cahn_potential();
  CHECK(sample_potential_sup(lift_1d(kink(), 3), G, 5.0) == 0.25);
  CHECK(sample_potential_sup(constant_field(2, 0.5), G, 1.0) == G.G(0.5));
}
