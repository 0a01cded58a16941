#pragma once

#include "silfs/core.hpp"

#include <map>
#include <utility>

namespace silfs {

/// Fraction of the n(n-1)/2 pairs on which two partitions agree (both
/// together or both apart). Computed from the contingency table.
inline double rand_index(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw InvalidArgument("rand_index: partitions differ in length");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) throw InvalidArgument("rand_index: need at least two items");

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double same_both = 0.0;
  for (const auto& [key, m] : joint) same_both += pairs(m);
  double same_a = 0.0;
  for (const auto& [key, m] : rows) same_a += pairs(m);
  double same_b = 0.0;
  for (const auto& [key, m] : cols) same_b += pairs(m);
  const double total = pairs(n);
  // Agreements = together in both + apart in both.
  return (total + 2.0 * same_both - same_a - same_b) / total;
}

struct RmsePair {
  double alpha = 0.0;
  double beta = 0.0;
};

/// sqrt( sum_reps ||est - truth||^2 / (N * dim) )
inline double pooled_rmse(const std::vector<Vector>& estimates, const std::vector<Vector>& truths) {
  if (estimates.size() != truths.size()) throw InvalidArgument("pooled_rmse: lists are not aligned");
  if (estimates.empty()) return 0.0;
  double sq = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != truths[i].size()) {
      throw InvalidArgument("pooled_rmse: estimate and truth differ in length");
    }
    sq += (estimates[i] - truths[i]).squaredNorm();
    count += static_cast<double>(truths[i].size());
  }
  return count > 0.0 ? std::sqrt(sq / count) : 0.0;
}

struct SelectionRates {
  double sensitivity = 1.0;
  double specificity = 1.0;
  bool sensitivity_undefined = false;  // truth has no nonzero entries
  bool specificity_undefined = false;  // truth has no zero entries
};

/// Support recovery rates with nonzero meaning |value| > kSupportThreshold.
/// An undefined rate (empty denominator) is reported as 1 and flagged.
inline SelectionRates selection_metrics(const Vector& beta_hat, const Vector& beta_true) {
  if (beta_hat.size() != beta_true.size()) {
    throw InvalidArgument("selection_metrics: vectors differ in length");
  }
  double pos = 0.0, hit = 0.0, neg = 0.0, kept_zero = 0.0;
  for (Index j = 0; j < beta_true.size(); ++j) {
    const bool truth = std::abs(beta_true[j]) > kSupportThreshold;
    const bool est = std::abs(beta_hat[j]) > kSupportThreshold;
    if (truth) {
      pos += 1.0;
      if (est) hit += 1.0;
    } else {
      neg += 1.0;
      if (!est) kept_zero += 1.0;
    }
  }
  SelectionRates out;
  if (pos > 0.0) {
    out.sensitivity = hit / pos;
  } else {
    out.sensitivity_undefined = true;
  }
  if (neg > 0.0) {
    out.specificity = kept_zero / neg;
  } else {
    out.specificity_undefined = true;
  }
  return out;
}

}  // namespace silfs
