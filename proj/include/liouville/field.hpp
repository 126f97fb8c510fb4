#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>

namespace liouville {

/// Largest dimension any field in the lab may carry.
inline constexpr int kMaxDim = 8;

/// A point of R^N, borrowed from the caller.
using Point = std::span<const double>;

/// Pure scalar evaluator on R^N with an optional analytic gradient.
///
/// Fields are cheap to copy; the captured state of the evaluators is expected
/// to be immutable so a field may be shared freely between threads.
class ScalarField {
 public:
  using Value = std::function<double(Point)>;
  using Gradient = std::function<void(Point, std::span<double>)>;

  ScalarField() = default;
  ScalarField(int dim, Value value, Gradient gradient = {})
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {
    if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("ScalarField: dimension out of range");
    if (!value_) throw std::invalid_argument("ScalarField: empty evaluator");
  }

  int dim() const { return dim_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }

  double operator()(Point x) const { return value_(x); }

  /// Writes the analytic gradient into `out` (size dim()).
  void gradient(Point x, std::span<double> out) const {
    if (!gradient_) throw std::logic_error("ScalarField: no analytic gradient attached");
    gradient_(x, out);
  }

 private:
  int dim_ = 0;
  Value value_;
  Gradient gradient_;
};

/// Pure vector evaluator R^N -> R^N.
class VectorField {
 public:
  using Value = std::function<void(Point, std::span<double>)>;

  VectorField() = default;
  VectorField(int dim, Value value) : dim_(dim), value_(std::move(value)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("VectorField: dimension out of range");
    if (!value_) throw std::invalid_argument("VectorField: empty evaluator");
  }

  int dim() const { return dim_; }
  void operator()(Point x, std::span<double> out) const { value_(x, out); }

 private:
  int dim_ = 0;
  Value value_;
};

/// A function of one real variable together with its derivative.
struct OneDimSolution {
  std::function<double(double)> u;
  std::function<double(double)> du;
};

}  // namespace liouville
