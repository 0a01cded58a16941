#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace silfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Labels = std::vector<int>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or non-finite input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra kernel failed or produced non-finite values.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Every candidate fit in a model-selection grid failed.
class SelectionFailure : public Error {
 public:
  using Error::Error;
};

/// Distance used inside the center-augmented penalty.
enum class Distance { absolute, squared };

inline const char* to_string(Distance d) {
  return d == Distance::absolute ? "absolute" : "squared";
}

inline double distance(double a, double b, Distance d) {
  const double diff = a - b;
  return d == Distance::absolute ? std::abs(diff) : diff * diff;
}

/// Coefficients with magnitude at or below this are treated as zero when
/// counting a support (BIC, GCV, sensitivity/specificity).
inline constexpr double kSupportThreshold = 1e-10;

inline Index support_size(const Vector& beta) {
  Index s = 0;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > kSupportThreshold) ++s;
  }
  return s;
}

inline double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

/// Response vector plus design matrix.
struct Dataset {
  Vector response;  // n
  Matrix design;    // n x p

  Index n() const { return design.rows(); }
  Index p() const { return design.cols(); }

  /// Throws DataError unless n >= 2, p >= 1, sizes agree and all entries are finite.
  void validate() const {
    if (design.rows() < 2) throw DataError("dataset needs at least 2 observations");
    if (design.cols() < 1) throw DataError("dataset needs at least 1 covariate");
    if (response.size() != design.rows()) {
      throw DataError("response length " + std::to_string(response.size()) +
                      " does not match design rows " + std::to_string(design.rows()));
    }
    if (!response.allFinite()) throw DataError("response contains non-finite entries");
    if (!design.allFinite()) throw DataError("design contains non-finite entries");
  }
};

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace silfs
