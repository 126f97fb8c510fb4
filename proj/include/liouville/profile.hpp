#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "liouville/field.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

/// Standard mollifier exp(-1/(1-t^2)) on (-1, 1), zero elsewhere.
double bump(double t);

/// Derivative of the odd profile: (k-2) * (t^2 + A*bump(t))^((1-k)/2).
/// Even, strictly positive, and equal to (k-2)|t|^(1-k) for |t| >= 1.
double g_prime(double t, double k, double amplitude);

/// t-derivative of g_prime.
double g_second(double t, double k, double amplitude);

/// Integral of g_prime over [0, 1] for a given amplitude.
IntegralResult bridge_integral(double k, double amplitude, const QuadratureSpec& spec);

struct ProfileOptions {
  double k_floor = 2.0 + 1e-3;  ///< smallest admissible exponent
  double bracket_lo = 1e-6;     ///< initial amplitude bracket
  double bracket_hi = 1e6;
  double bracket_min = 1e-300;  ///< limits of geometric bracket expansion
  double bracket_max = 1e300;
  int max_bisections = 400;
  int cache_intervals = 4096;   ///< nodes of the interpolated bridge table on [0, 1]
};

/// Rejects k below the configured floor (C1 = 8/(k(k-2)) degenerates at k=2).
void require_admissible_k(double k, const ProfileOptions& options = {});

/// Amplitude A* with |integral_0^1 g' - 1| <= tol, by geometric bisection on A.
/// Throws std::runtime_error when no bracket exists within the options' limits.
double solve_bridge_amplitude(double k, double tol, const ProfileOptions& options = {});

/// The odd profile g: smooth bridge on (-1, 1) joined to 2 - |t|^(2-k).
///
/// Construction solves the bridge amplitude once and fills a table of the
/// bridge primitive; evaluation afterwards is pure and thread-safe.
class Profile {
 public:
  static Profile build(double k, double tol = 1e-10, const ProfileOptions& options = {});

  double k() const;
  double amplitude() const;
  /// integral_0^1 g' - 1 at the solved amplitude.
  double bridge_residual() const;

  double g(double t) const;
  double g_prime(double t) const;
  double g_second(double t) const;

  /// 8 / (k (k - 2)).
  double C1() const;
  /// 8 * integral_0^1 dt/g' - C1, so that 8 integral_0^R dt/g' = C1 R^k + C2.
  double C2() const;
  /// 8 * integral_0^R dt / g'(t), closed form beyond R = 1.
  double slab_bound(double R) const;

 private:
  struct State;
  explicit Profile(std::shared_ptr<const State> state) : state_(std::move(state)) {}
  std::shared_ptr<const State> state_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double s) const { return s >= lo && s <= hi; }
  bool contains_open(double s) const { return s > lo && s < hi; }
};

/// A C^2 nonnegative potential with the derivatives the checks need.
class Potential {
 public:
  using Fn = std::function<double(double)>;

  Potential(std::string name, Fn G, Fn dG, Fn d2G, Fn sqrt_second, Interval admissible);

  const std::string& name() const { return name_; }
  double G(double s) const { return G_(s); }
  double dG(double s) const { return dG_(s); }
  double d2G(double s) const { return d2G_(s); }
  /// (sqrt G)'' ; throws std::domain_error outside the open admissible interval.
  double sqrt_second(double s) const;
  /// (sqrt G)' = G' / (2 sqrt G) ; throws std::domain_error outside the admissible interval.
  double sqrt_first(double s) const;
  double sqrt_G(double s) const { return std::sqrt(G_(s)); }
  const Interval& admissible() const { return admissible_; }

 private:
  std::string name_;
  Fn G_, dG_, d2G_, sqrt_second_;
  Interval admissible_;
};

/// G(s) = (1 - s^2)^2 / 4 on (-1, 1).
Potential allen_cahn_potential();

struct HConstant {
  double K = 0.0;
  Interval interval;
};

/// K = min of -(sqrt G)'' over a uniform grid of `samples` points (the
/// midpoint when samples == 1). Empty result when the minimum is <= 0.
std::optional<HConstant> hypothesis_H_constant(const Potential& G, Interval interval, int samples);

/// tanh(x / sqrt 2) and its derivative (1 - u^2)/sqrt 2.
OneDimSolution kink();

}  // namespace liouville
