#include "irsce/linalg.hpp"

#include <Eigen/SVD>

namespace irsce {

namespace {

double condition_from(const Eigen::VectorXd& sv) {
  if (sv.size() == 0) return std::numeric_limits<double>::infinity();
  double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace

double condition_number(const CMat& a) {
  // Jacobi is accurate and cheap for small systems; the divide-and-conquer
  // SVD scales far better for the larger grouped solves.
  if (std::min(a.rows(), a.cols()) <= 32) {
    return condition_from(Eigen::JacobiSVD<CMat>(a).singularValues());
  }
  return condition_from(Eigen::BDCSVD<CMat>(a).singularValues());
}

GatedLeastSquares::GatedLeastSquares(const CMat& a, double max_condition)
    : qr_(a), condition_(condition_number(a)) {
  if (!(condition_ <= max_condition)) {
    throw ConditioningError(
        "least-squares system condition number " + std::to_string(condition_) +
            " exceeds gate " + std::to_string(max_condition),
        condition_);
  }
}

CVec GatedLeastSquares::solve(const CVec& rhs) const { return qr_.solve(rhs); }

}  // namespace irsce
