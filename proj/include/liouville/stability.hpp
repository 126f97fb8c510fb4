#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liouville/field.hpp"
#include "liouville/profile.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

/// Compactly supported perturbation. The field vanishes for |x| >= support_radius;
/// `radial_breaks` are radii where it is only Lipschitz.
struct TestFunction {
  ScalarField field;
  double support_radius = 1.0;
  std::vector<double> radial_breaks;
  std::string kind;
};

/// Q(v) = integral of |grad v|^2 + G''(u) v^2 over the support ball of v.
double quadratic_form_Q(const ScalarField& u, const Potential& G, const TestFunction& v, const QuadratureSpec& spec);

/// Deliberate corruptions of the right-hand side, used to prove the identity
/// check can fail.
enum class RhsMutation {
  none,
  drop_deficit_term,  ///< omit 2 (G - |grad u|^2/2) (sqrt G)'' sqrt G mu^2
  flip_deficit_sign,  ///< use G + |grad u|^2/2 in place of G - |grad u|^2/2
};

struct IdentityTerms {
  double lhs = 0.0;  ///< Q(sqrt(G(u)) mu)
  double rhs = 0.0;  ///< integral of G|grad mu|^2 + 2 (G - |grad u|^2/2) (sqrt G)''(u) sqrt(G) mu^2
  double gap = 0.0;  ///< |lhs - rhs| / (|lhs| + |rhs| + 1)
};

/// Both sides of the stability identity for w = sqrt(G(u)) mu on one node set.
/// Throws std::domain_error if u leaves the admissible interval of G.
IdentityTerms lemma_identity(const ScalarField& u, const Potential& G, const TestFunction& mu,
                             const QuadratureSpec& spec, RhsMutation mutation = RhsMutation::none);

double lemma_identity_gap(const ScalarField& u, const Potential& G, const TestFunction& mu,
                          const QuadratureSpec& spec, RhsMutation mutation = RhsMutation::none);

struct StabilityInequality {
  double gradient_side = 0.0;  ///< integral of G(u) |grad mu|^2
  double deficit_side = 0.0;   ///< integral of (G - |grad u|^2/2)(-2 (sqrt G)'') sqrt(G) mu^2
  double slack = 0.0;          ///< gradient_side - deficit_side
};

StabilityInequality stability_inequality(const ScalarField& u, const Potential& G, const TestFunction& mu,
                                         const QuadratureSpec& spec);

/// True when every mu satisfies the inequality up to -slack.
bool stability_equivalence_check(const ScalarField& u, const Potential& G, const std::vector<TestFunction>& mus,
                                 const QuadratureSpec& spec, double slack = 1e-8);

/// mu = 1 on B_R, 2 - |x|/R on B_2R \ B_R, 0 beyond.
TestFunction radial_cutoff(double R, int N);

/// Seeded corpus: radial cutoffs times low-degree trigonometric polynomials,
/// alternating with radial cutoffs times off-center Gaussian bumps. All
/// supports lie in B_8.
std::vector<TestFunction> random_test_functions(int N, std::size_t count, std::uint64_t seed);

/// sup of G(u) over B_radius, sampled on a polar grid that includes the origin.
double sample_potential_sup(const ScalarField& u, const Potential& G, double radius);

struct CutoffReplay {
  double lhs = 0.0;      ///< integral over B_2R \ B_R of G(u) / R^2
  double rhs = 0.0;      ///< M (2^N - 1) |B_1| R^(N-2)
  double chained = 0.0;  ///< 2K integral over B_R of (G - |grad u|^2/2) sqrt(G)
  double M = 0.0;
};

CutoffReplay cutoff_bound_replay(const ScalarField& u, const Potential& G, double R, double K,
                                 const QuadratureSpec& spec, std::optional<double> M = std::nullopt);

}  // namespace liouville
