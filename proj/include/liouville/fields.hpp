#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "liouville/field.hpp"
#include "liouville/profile.hpp"

namespace liouville {

/// Normalized transverse Gaussian on R^(N-1): pi^(-(N-1)/4) exp(-|y|^2/2),
/// so that its square integrates to 1. For N = 1 there are no transverse
/// variables and the returned 0-dimensional field is identically 1.
ScalarField gaussian_H(int N);

/// phi(x) = H(x_1..x_{N-1}) / sqrt(g'(x_N)) and sigma(x) = g(x_N).
struct Counterexample {
  ScalarField phi;
  ScalarField sigma;
};

Counterexample counterexample(int N, const Profile& profile);

/// Pointwise phi^2 grad(sigma). Uses sigma's analytic gradient when attached,
/// central differences otherwise.
VectorField flux(const ScalarField& phi, const ScalarField& sigma);

/// h = 1e-3 * max(1, |p|_inf).
double default_step(Point p);

/// Central-difference divergence sum_i (F_i(p + h e_i) - F_i(p - h e_i)) / (2h).
double divergence_residual(const VectorField& F, Point p, double h);

/// Divergence of phi^2 grad(sigma) built from plain evaluations: the inner
/// gradient of sigma and the outer divergence are both central differences
/// with step h, so no analytic simplification of the flux is used.
double hard_divergence_residual(const ScalarField& phi, const ScalarField& sigma, Point p, double h);

/// log2(|r(h)| / |r(h/2)|).
double richardson_order(double residual_h, double residual_half_h);

/// Central-difference gradient with step h.
void fd_gradient(const ScalarField& f, Point p, double h, std::span<double> out);

/// Second-order five/seven-point Laplacian with step h.
double laplacian_fd(const ScalarField& f, Point p, double h);

/// Observed convergence order of the central-difference gradient against the
/// attached analytic gradient under h -> h/2 (max-norm of the mismatch).
double gradient_fd_order(const ScalarField& f, Point p, double h);

/// U(x) = u(x_N), grad U = (0, ..., 0, u'(x_N)).
ScalarField lift_1d(const OneDimSolution& solution, int N);

/// Constant field with zero gradient.
ScalarField constant_field(int N, double c);

/// Flat list of points of R^N.
struct SampleSet {
  int dim = 1;
  std::vector<double> coords;

  std::size_t size() const { return dim > 0 ? coords.size() / dim : 0; }
  Point operator[](std::size_t i) const { return Point(coords.data() + i * dim, dim); }
};

struct DivergenceCertificate {
  double max_residual = 0.0;       ///< max |div| at step h
  double max_residual_half = 0.0;  ///< max |div| at step h/2
  double order = 0.0;              ///< richardson_order of the two maxima
};

/// Divergence of phi^2 grad(sigma) at every sample point, at steps h and h/2.
/// `hard` selects hard_divergence_residual over the analytic flux.
DivergenceCertificate certify_divergence(const Counterexample& fields, const SampleSet& points, double h, bool hard);

/// `count` points uniform in the ball of the given radius (seeded, deterministic).
SampleSet random_ball_points(int N, std::size_t count, double radius, std::uint64_t seed);

}  // namespace liouville
