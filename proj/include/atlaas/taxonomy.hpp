#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atlaas/types.hpp"

namespace atlaas {

struct TaxonomyNode {
  LabelId id = 0;
  std::optional<LabelId> parent; // empty for the root
  std::string name;
};

/// Rooted label tree. Node ids are dense 0..N-1 and a parent always has a
/// smaller id than its children, so ancestor walks terminate at the root.
class Taxonomy {
 public:
  /// Validates tree shape (single root, parents exist, dense ids, unique
  /// names) and caches depths and the leaf set. Throws std::invalid_argument.
  static Taxonomy from_nodes(std::vector<TaxonomyNode> nodes);

  size_t size() const { return nodes_.size(); }
  const TaxonomyNode& node(LabelId id) const { return nodes_[id]; }
  bool has_label(LabelId id) const { return id < nodes_.size(); }
  LabelId root() const { return root_; }
  uint32_t depth(LabelId id) const { return depth_[id]; }
  uint32_t max_depth() const { return max_depth_; }
  /// Leaf label ids, ascending.
  const std::vector<LabelId>& leaves() const { return leaves_; }

  bool operator==(const Taxonomy& other) const { return nodes_eq(other); }

 private:
  Taxonomy() = default;
  bool nodes_eq(const Taxonomy& other) const;

  std::vector<TaxonomyNode> nodes_;
  std::vector<uint32_t> depth_;
  std::vector<LabelId> leaves_;
  LabelId root_ = 0;
  uint32_t max_depth_ = 0;
};

/// Grows a random tree breadth-first: each frontier node receives a child
/// count drawn uniformly from [branch_min, branch_max] until n_labels nodes
/// exist. Deterministic for a fixed seed.
Taxonomy generate_taxonomy(uint64_t seed, uint32_t n_labels,
                           uint32_t branch_min, uint32_t branch_max);

/// Line format: "taxonomy <n>" header, then one "<id> <parent|-> <name>"
/// per node. Names must not contain whitespace.
void write_taxonomy(std::ostream& os, const Taxonomy& t);
Taxonomy read_taxonomy(std::istream& is);

} // namespace atlaas
