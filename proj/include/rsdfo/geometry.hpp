#pragma once

#include <Eigen/Dense>

#include "rsdfo/rng.hpp"

namespace rsdfo {

/// A point on the unit sphere S^{d-1}.
class UnitVector {
 public:
  /// Normalizes `v`; throws DomainError if its norm is zero or not finite.
  explicit UnitVector(Eigen::VectorXd v);

  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  Eigen::Index dim() const noexcept { return coords_.size(); }

 private:
  Eigen::VectorXd coords_;
};

/// A d x p matrix with orthonormal columns (a point of the Stiefel manifold).
class SubspaceBasis {
 public:
  /// Takes ownership of `columns`; throws DomainError when the columns are
  /// not orthonormal to within `tol` entrywise.
  explicit SubspaceBasis(Eigen::MatrixXd columns, double tol = 1e-10);

  const Eigen::MatrixXd& columns() const noexcept { return columns_; }
  Eigen::Index ambient_dim() const noexcept { return columns_.rows(); }
  Eigen::Index subspace_dim() const noexcept { return columns_.cols(); }

  /// max |B^T B - I| entrywise.
  double orthonormality_defect() const;

 private:
  Eigen::MatrixXd columns_;
};

/// Uniform sample on S^{d-1}: a normalized standard Gaussian vector.
UnitVector sample_unit_vector(Eigen::Index d, RngStream& rng);

/// Uniform (Haar) sample on V_{p,d}: sign-corrected thin QR factor of a
/// d x p standard Gaussian matrix.
SubspaceBasis sample_stiefel(Eigen::Index d, Eigen::Index p, RngStream& rng);

/// Fills `out` with i.i.d. standard normals.
void fill_normal(Eigen::Ref<Eigen::MatrixXd> out, RngStream& rng);

}  // namespace rsdfo
