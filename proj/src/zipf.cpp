#include "atlaas/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace atlaas {

ZipfAssignment::ZipfAssignment(double exponent, std::vector<LabelId> ranked_labels)
    : s_(exponent), ranked_(std::move(ranked_labels)) {
  if (!(s_ > 0.0)) throw std::invalid_argument("zipf: exponent must be > 0");
  if (ranked_.empty()) throw std::invalid_argument("zipf: no labels");
  cdf_.resize(ranked_.size());
  double total = 0.0;
  for (size_t r = 1; r <= ranked_.size(); ++r)
    total += std::pow(static_cast<double>(r), -s_);
  double acc = 0.0;
  for (size_t r = 1; r <= ranked_.size(); ++r) {
    acc += std::pow(static_cast<double>(r), -s_) / total;
    cdf_[r - 1] = acc;
  }
  cdf_.back() = 1.0;
}

double ZipfAssignment::probability(size_t rank_1based) const {
  if (rank_1based < 1 || rank_1based > cdf_.size())
    throw std::invalid_argument("zipf: rank out of range");
  double lo = rank_1based == 1 ? 0.0 : cdf_[rank_1based - 2];
  return cdf_[rank_1based - 1] - lo;
}

LabelId ZipfAssignment::sample(Rng& rng) const {
  double u = rng.uniform01();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  size_t idx = static_cast<size_t>(it - cdf_.begin());
  if (idx >= ranked_.size()) idx = ranked_.size() - 1;
  return ranked_[idx];
}

std::vector<LabelId> ZipfAssignment::sample_distinct(Rng& rng, size_t m) const {
  if (m > ranked_.size())
    throw std::invalid_argument("zipf: not enough labels for distinct sample");
  std::set<LabelId> seen;
  std::vector<LabelId> out;
  while (out.size() < m) {
    LabelId l = sample(rng);
    if (seen.insert(l).second) out.push_back(l);
  }
  return out;
}

} // namespace atlaas
