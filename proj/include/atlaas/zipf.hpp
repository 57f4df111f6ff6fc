#pragma once

#include <cstdint>
#include <vector>

#include "atlaas/rng.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

/// Zipf law over a ranked permutation of leaf labels: rank r (1-based) has
/// probability r^-s / Σ_{i=1..N} i^-s.
class ZipfAssignment {
 public:
  ZipfAssignment(double exponent, std::vector<LabelId> ranked_labels);

  double exponent() const { return s_; }
  const std::vector<LabelId>& ranked_labels() const { return ranked_; }
  double probability(size_t rank_1based) const;

  LabelId sample(Rng& rng) const;
  /// m distinct labels via rejection against the ranked CDF.
  std::vector<LabelId> sample_distinct(Rng& rng, size_t m) const;

 private:
  double s_;
  std::vector<LabelId> ranked_;
  std::vector<double> cdf_;
};

} // namespace atlaas
