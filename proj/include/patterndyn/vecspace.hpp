#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "patterndyn/error.hpp"
#include "patterndyn/rng.hpp"

namespace patterndyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kUnitTolerance = 1e-12;

/// A vector of Euclidean norm one (within 1e-12).
class UnitVector {
 public:
  /// Validates; throws invalid-argument if the norm is off by more than 1e-12.
  explicit UnitVector(Vector coords);

  /// Normalizes `v`; throws undefined-angle on a (numerically) zero vector.
  static UnitVector normalized(const Eigen::Ref<const Vector>& v);

  const Vector& coords() const noexcept { return coords_; }
  operator const Vector&() const noexcept { return coords_; }
  Index dim() const noexcept { return coords_.size(); }
  double operator[](Index i) const { return coords_[i]; }

  UnitVector operator-() const { return UnitVector(Unchecked{}, -coords_); }

 private:
  struct Unchecked {};
  UnitVector(Unchecked, Vector coords) : coords_(std::move(coords)) {}
  Vector coords_;
};

/// Key patterns of a data law together with their Gram matrix and an
/// orthonormal basis of their span (rank may be lower than the pattern count,
/// e.g. p+ = -p-).
class PatternBasis {
 public:
  explicit PatternBasis(std::vector<UnitVector> patterns);

  Index size() const noexcept { return static_cast<Index>(patterns_.size()); }
  Index dim() const noexcept { return patterns_.front().dim(); }
  Index rank() const noexcept { return span_.cols(); }

  const UnitVector& operator[](Index i) const { return patterns_.at(static_cast<std::size_t>(i)); }
  const std::vector<UnitVector>& patterns() const noexcept { return patterns_; }

  /// Patterns as columns, d x n.
  const Matrix& matrix() const noexcept { return matrix_; }
  const Matrix& gram() const noexcept { return gram_; }
  /// Orthonormal columns spanning the patterns, d x rank.
  const Matrix& span_basis() const noexcept { return span_; }

  template <typename Derived>
  Vector project_onto_span(const Eigen::MatrixBase<Derived>& v) const {
    return span_ * (span_.transpose() * v);
  }
  template <typename Derived>
  Vector project_onto_complement(const Eigen::MatrixBase<Derived>& v) const {
    Vector r = v - span_ * (span_.transpose() * v);
    r -= span_ * (span_.transpose() * r);
    return r;
  }

 private:
  std::vector<UnitVector> patterns_;
  Matrix matrix_;
  Matrix gram_;
  Matrix span_;
};

/// w = sum_j coefficients_j * pattern_j + perp, with perp orthogonal to the span.
struct Decomposition {
  Vector coefficients;
  Vector perp;
  double perp_norm = 0.0;
};

/// Uniform on the (dim-1)-sphere: normalized standard Gaussian.
UnitVector sample_unit_sphere(Index dim, Rng& rng);

/// Uniform on the unit sphere of span(basis)^perp.
UnitVector sample_unit_orthocomplement(const PatternBasis& basis, Rng& rng);

/// Uniform on the radius ball inside span(basis).
Vector sample_ball_in_span(const PatternBasis& basis, double radius, Rng& rng);

/// Uniform on the radius ball inside span(basis)^perp.
Vector sample_ball_in_orthocomplement(const PatternBasis& basis, double radius, Rng& rng);

/// Uniform on the radius ball of R^dim.
Vector sample_ball(Index dim, double radius, Rng& rng);

/// Least-squares split of w over the patterns. Throws degenerate-basis when the
/// Gram matrix has condition number above 1e12.
Decomposition decompose(const Eigen::Ref<const Vector>& w, const PatternBasis& basis);

/// sin of the angle between u and v, in [0, 1].
template <typename A, typename B>
double sine_angle(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  require(nu > 0.0 && nv > 0.0, ErrorCode::undefined_angle, "sine_angle of a zero vector");
  const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
  return std::clamp(std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0, 1.0);
}

/// cos of the angle between u and v, in [-1, 1].
template <typename A, typename B>
double cosine_angle(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  require(nu > 0.0 && nv > 0.0, ErrorCode::undefined_angle, "cosine_angle of a zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace patterndyn
