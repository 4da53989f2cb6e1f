#include "rsdfo/geometry.hpp"

#include <cmath>
#include <string>

#include "rsdfo/errors.hpp"

namespace rsdfo {

UnitVector::UnitVector(Eigen::VectorXd v) : coords_(std::move(v)) {
  const double n = coords_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("UnitVector: vector has zero or non-finite norm");
  }
  coords_ /= n;
}

SubspaceBasis::SubspaceBasis(Eigen::MatrixXd columns, double tol)
    : columns_(std::move(columns)) {
  if (columns_.cols() < 1 || columns_.cols() > columns_.rows()) {
    throw InvalidDimension("SubspaceBasis: need 1 <= p <= d, got d=" +
                           std::to_string(columns_.rows()) +
                           " p=" + std::to_string(columns_.cols()));
  }
  if (orthonormality_defect() > tol) {
    throw DomainError("SubspaceBasis: columns are not orthonormal");
  }
}

double SubspaceBasis::orthonormality_defect() const {
  const Eigen::Index p = columns_.cols();
  return (columns_.transpose() * columns_ - Eigen::MatrixXd::Identity(p, p))
      .cwiseAbs()
      .maxCoeff();
}

void fill_normal(Eigen::Ref<Eigen::MatrixXd> out, RngStream& rng) {
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = rng.normal();
}

UnitVector sample_unit_vector(Eigen::Index d, RngStream& rng) {
  if (d < 1) throw InvalidDimension("sample_unit_vector: d must be >= 1");
  Eigen::VectorXd z(d);
  double n = 0.0;
  do {
    fill_normal(z, rng);
    n = z.norm();
  } while (n < 1e-300);
  return UnitVector(std::move(z));
}

SubspaceBasis sample_stiefel(Eigen::Index d, Eigen::Index p, RngStream& rng) {
  if (d < 1 || p < 1 || p > d) {
    throw InvalidDimension("sample_stiefel: need 1 <= p <= d, got d=" +
                           std::to_string(d) + " p=" + std::to_string(p));
  }
  Eigen::MatrixXd gauss(d, p);
  fill_normal(gauss, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, p);
  const auto& r = qr.matrixQR();
  // Haar uniformity needs R with positive diagonal.
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return SubspaceBasis(std::move(q));
}

}  // namespace rsdfo
