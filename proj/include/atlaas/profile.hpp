#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "atlaas/taxonomy.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

/// Sparse non-negative weight vector over taxonomy labels, sorted by label
/// id, with a cached Euclidean norm. Immutable after construction and never
/// empty; absent labels have weight zero.
class Profile {
 public:
  using Entry = std::pair<LabelId, double>;

  /// Sums duplicate labels, rejects non-positive weights and empty input.
  static Profile from_weights(std::vector<Entry> weights);

  const std::vector<Entry>& weights() const { return weights_; }
  double norm() const { return norm_; }
  size_t support_size() const { return weights_.size(); }
  double weight(LabelId id) const;

  /// Copy scaled to unit Euclidean norm.
  Profile normalized() const;

  bool operator==(const Profile& other) const { return weights_ == other.weights_; }

 private:
  Profile() = default;
  std::vector<Entry> weights_;
  double norm_ = 0.0;
};

/// Σ p_i q_i via merge join over the sorted supports; products accumulate in
/// ascending label order regardless of argument order, so the result is
/// exactly symmetric.
double dot(const Profile& p, const Profile& q);

/// Cosine similarity in [0, 1] (non-negative weights).
double similarity(const Profile& p, const Profile& q);

/// Each input label contributes weight * decay^d to every ancestor at
/// distance d (itself at d = 0); contributions to one label sum; the result
/// is unit-normalized.
Profile expand_profile(std::span<const std::pair<LabelId, double>> labels,
                       const Taxonomy& taxonomy, double decay);

/// Exact top-k by similarity to the sample, descending, ties broken by
/// ascending peer id. Empty population yields an empty list.
std::vector<std::pair<PeerId, double>> brute_force_top_k(
    const Profile& sample,
    std::span<const std::pair<PeerId, ProfileRef>> population, size_t k);

/// Profile-set line format: "profiles <n>" header, then one
/// "<peer-id> <label:weight> ..." line per profile. Weights print with 17
/// significant digits, so a round-trip is lossless.
void write_profiles(std::ostream& os,
                    std::span<const std::pair<PeerId, ProfileRef>> profiles);
std::vector<std::pair<PeerId, ProfileRef>> read_profiles(std::istream& is);

} // namespace atlaas
