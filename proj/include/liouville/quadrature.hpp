#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "liouville/field.hpp"

namespace liouville {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Knobs shared by every integral in the lab.
struct QuadratureSpec {
  int radial_order = 10;         ///< Gauss-Legendre nodes per panel; error estimate pairs it with 2x
  int angular_order = 16;        ///< starting node count of the periodic trapezoid rules
  int max_subdivisions = 20000;  ///< panel budget of one adaptive integration
  double tolerance = 1e-12;      ///< relative target
  double abs_tolerance = 1e-15;  ///< absolute floor of the target
  double panel_length = 4.0;     ///< initial panel length / arc spacing

  void validate() const;
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
};

/// Vector-valued integral; all components share one set of nodes.
struct MultiResult {
  std::vector<double> value;
  std::vector<double> error;
};

/// Integration domain. `inner`/`outer` hold R1/R2 for annuli, R for balls and
/// slabs (inner unused), and a/b for intervals.
struct Region {
  enum class Kind { ball, annulus, slab, interval };

  Kind kind = Kind::ball;
  int dim = 1;
  double inner = 0.0;
  double outer = 1.0;

  static Region ball(int dim, double radius);
  static Region annulus(int dim, double r_inner, double r_outer);
  static Region slab(int dim, double half_width);
  static Region interval(double a, double b);

  void validate() const;
  std::string describe() const;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of order n (n >= 1). The returned reference stays valid.
const GaussRule& gauss_legendre(int n);

/// Pairwise (cascade) summation; fixed reduction tree for a given length.
double pairwise_sum(std::span<const double> values);

/// Volume of the unit ball of R^N.
double unit_ball_volume(int dim);

/// Integrand along a line: writes m values and m nested error contributions
/// (the error span may be ignored by integrands that are exact).
using LineIntegrand = std::function<void(double, std::span<double>, std::span<double>)>;

/// Integrand over R^N with m components.
using PointIntegrand = std::function<void(Point, std::span<double>)>;

/// Global adaptive Gauss-Legendre over [breaks.front(), breaks.back()].
/// Every interior break starts a new panel. Throws QuadratureError when the
/// panel budget is exhausted before the target is met.
MultiResult integrate_adaptive(const LineIntegrand& f, std::size_t components,
                               std::span<const double> breaks, const QuadratureSpec& spec);

/// Ball / annulus / interval integration of a vector-valued integrand.
/// `radial_breaks` lists radii at which the integrand may have kinks.
/// Slabs are rejected here; use the separable overload of integrate().
MultiResult integrate_region(const PointIntegrand& f, std::size_t components, const Region& region,
                             const QuadratureSpec& spec, std::span<const double> radial_breaks = {});

IntegralResult integrate(const ScalarField& f, const Region& region, const QuadratureSpec& spec,
                         std::span<const double> radial_breaks = {});

/// Integrand of the form w(y) * a(x_N) on R^{N-1} x R where the transverse
/// weight w has a closed-form integral over R^{N-1}.
struct SeparableField {
  int dim = 1;
  double transverse_integral = 1.0;
  std::function<double(double)> axial;
};

/// Slab integral of a separable integrand: transverse closed form times an
/// adaptive 1D integral over (-R, R). Non-slab regions are rejected.
IntegralResult integrate(const SeparableField& f, const Region& region, const QuadratureSpec& spec);

IntegralResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureSpec& spec);

/// (integral of |f|^p over the region)^(1/p).
double norm_p(const ScalarField& f, const Region& region, double p, const QuadratureSpec& spec);

/// ||alpha beta||_1, ||alpha||_{3/2}, ||beta||_3 on one shared node set, so the
/// discrete Hoelder inequality holds up to rounding.
struct HolderNorms {
  double product_l1 = 0.0;
  double alpha_three_halves = 0.0;
  double beta_three = 0.0;
};

HolderNorms holder_norms(const ScalarField& alpha, const ScalarField& beta, const Region& region,
                         const QuadratureSpec& spec, std::span<const double> radial_breaks = {});

}  // namespace liouville
