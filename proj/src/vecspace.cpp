#include "patterndyn/vecspace.hpp"

#include <Eigen/Eigenvalues>

namespace patterndyn {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kMinProjectedNorm = 1e-12;
constexpr double kMaxGramCondition = 1e12;

Vector gaussian(Index dim, Rng& rng) {
  Vector g(dim);
  for (Index i = 0; i < dim; ++i) g[i] = rng.normal();
  return g;
}

void require_radius(double radius) {
  require(radius >= 0.0 && std::isfinite(radius), ErrorCode::invalid_argument,
          "ball radius must be finite and non-negative");
}

}  // namespace

UnitVector::UnitVector(Vector coords) : coords_(std::move(coords)) {
  require(coords_.size() >= 1, ErrorCode::invalid_dimension, "unit vector of dimension 0");
  require(std::abs(coords_.norm() - 1.0) <= kUnitTolerance, ErrorCode::invalid_argument,
          "vector is not unit norm");
}

UnitVector UnitVector::normalized(const Eigen::Ref<const Vector>& v) {
  const double n = v.norm();
  require(n > 0.0 && std::isfinite(n), ErrorCode::undefined_angle, "cannot normalize a zero vector");
  return UnitVector(Unchecked{}, v / n);
}

PatternBasis::PatternBasis(std::vector<UnitVector> patterns) : patterns_(std::move(patterns)) {
  require(!patterns_.empty(), ErrorCode::invalid_argument, "pattern basis needs at least one pattern");
  const Index d = patterns_.front().dim();
  const auto n = static_cast<Index>(patterns_.size());
  matrix_.resize(d, n);
  for (Index j = 0; j < n; ++j) {
    require(patterns_[static_cast<std::size_t>(j)].dim() == d, ErrorCode::shape_mismatch,
            "patterns of differing dimension");
    matrix_.col(j) = patterns_[static_cast<std::size_t>(j)].coords();
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      require((matrix_.col(i) - matrix_.col(j)).norm() > kUnitTolerance, ErrorCode::invalid_argument,
              "patterns must be pairwise distinct");

  gram_ = matrix_.transpose() * matrix_;
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
  gram_.diagonal().setOnes();

  Eigen::ColPivHouseholderQR<Matrix> qr(matrix_);
  qr.setThreshold(kRankTolerance);
  const Index r = qr.rank();
  const Matrix q = qr.householderQ() * Matrix::Identity(d, r);
  span_ = q;
}

UnitVector sample_unit_sphere(Index dim, Rng& rng) {
  require(dim >= 1, ErrorCode::invalid_dimension, "sphere dimension must be positive");
  for (;;) {
    Vector g = gaussian(dim, rng);
    if (g.norm() >= kMinProjectedNorm) return UnitVector::normalized(g);
  }
}

UnitVector sample_unit_orthocomplement(const PatternBasis& basis, Rng& rng) {
  require(basis.rank() < basis.dim(), ErrorCode::no_orthocomplement,
          "patterns span the whole space");
  for (;;) {
    const Vector g = basis.project_onto_complement(gaussian(basis.dim(), rng));
    if (g.norm() < kMinProjectedNorm) continue;
    Vector u = g / g.norm();
    // Normalizing can reintroduce a few ulps along the span; one more sweep.
    u = basis.project_onto_complement(u);
    return UnitVector::normalized(u);
  }
}

Vector sample_ball_in_span(const PatternBasis& basis, double radius, Rng& rng) {
  require_radius(radius);
  const Index r = basis.rank();
  if (radius == 0.0) return Vector::Zero(basis.dim());
  Vector g;
  do {
    g = gaussian(r, rng);
  } while (g.norm() < kMinProjectedNorm);
  const double scale = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(r));
  return basis.span_basis() * (g * (scale / g.norm()));
}

Vector sample_ball_in_orthocomplement(const PatternBasis& basis, double radius, Rng& rng) {
  require_radius(radius);
  if (radius == 0.0) return Vector::Zero(basis.dim());
  const UnitVector dir = sample_unit_orthocomplement(basis, rng);
  const auto sub_dim = static_cast<double>(basis.dim() - basis.rank());
  return dir.coords() * (radius * std::pow(rng.uniform(), 1.0 / sub_dim));
}

Vector sample_ball(Index dim, double radius, Rng& rng) {
  require_radius(radius);
  require(dim >= 1, ErrorCode::invalid_dimension, "ball dimension must be positive");
  if (radius == 0.0) return Vector::Zero(dim);
  const UnitVector dir = sample_unit_sphere(dim, rng);
  return dir.coords() * (radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim)));
}

Decomposition decompose(const Eigen::Ref<const Vector>& w, const PatternBasis& basis) {
  require(w.size() == basis.dim(), ErrorCode::shape_mismatch, "decompose: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(basis.gram(), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  require(lo > 0.0 && hi / lo <= kMaxGramCondition, ErrorCode::degenerate_basis,
          "pattern basis is numerically dependent");

  Decomposition out;
  out.coefficients = basis.gram().ldlt().solve(basis.matrix().transpose() * w);
  out.perp = w - basis.matrix() * out.coefficients;
  out.perp_norm = out.perp.norm();
  return out;
}

}  // namespace patterndyn
