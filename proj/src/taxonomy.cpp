#include "atlaas/taxonomy.hpp"

#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "atlaas/rng.hpp"

namespace atlaas {

Taxonomy Taxonomy::from_nodes(std::vector<TaxonomyNode> nodes) {
  if (nodes.empty()) throw std::invalid_argument("taxonomy: no nodes");
  std::set<std::string> names;
  size_t roots = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id != i) throw std::invalid_argument("taxonomy: ids must be dense 0..N-1");
    if (!n.parent) {
      ++roots;
    } else if (*n.parent >= nodes.size() || *n.parent == n.id) {
      throw std::invalid_argument("taxonomy: bad parent id");
    }
    if (!names.insert(n.name).second)
      throw std::invalid_argument("taxonomy: duplicate name '" + n.name + "'");
  }
  if (roots != 1) throw std::invalid_argument("taxonomy: exactly one root required");

  Taxonomy t;
  t.nodes_ = std::move(nodes);
  t.depth_.assign(t.nodes_.size(), 0);
  std::vector<char> has_child(t.nodes_.size(), 0);
  std::vector<char> visited(t.nodes_.size(), 0);
  for (size_t i = 0; i < t.nodes_.size(); ++i) {
    if (!t.nodes_[i].parent) t.root_ = static_cast<LabelId>(i);
    else has_child[*t.nodes_[i].parent] = 1;
  }
  // depth via ancestor walk; cycle check bounded by node count
  for (size_t i = 0; i < t.nodes_.size(); ++i) {
    uint32_t d = 0;
    LabelId cur = static_cast<LabelId>(i);
    while (t.nodes_[cur].parent) {
      cur = *t.nodes_[cur].parent;
      if (++d > t.nodes_.size()) throw std::invalid_argument("taxonomy: cycle detected");
    }
    t.depth_[i] = d;
    visited[i] = 1;
    if (d > t.max_depth_) t.max_depth_ = d;
  }
  for (size_t i = 0; i < t.nodes_.size(); ++i)
    if (!has_child[i]) t.leaves_.push_back(static_cast<LabelId>(i));
  return t;
}

bool Taxonomy::nodes_eq(const Taxonomy& other) const {
  if (nodes_.size() != other.nodes_.size()) return false;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].parent != other.nodes_[i].parent) return false;
    if (nodes_[i].name != other.nodes_[i].name) return false;
  }
  return true;
}

Taxonomy generate_taxonomy(uint64_t seed, uint32_t n_labels,
                           uint32_t branch_min, uint32_t branch_max) {
  if (n_labels < 1) throw std::invalid_argument("generate_taxonomy: n_labels >= 1");
  if (branch_min < 1 || branch_min > branch_max)
    throw std::invalid_argument("generate_taxonomy: need 1 <= branch_min <= branch_max");

  Rng rng(seed ^ 0x7a78);
  std::vector<TaxonomyNode> nodes;
  nodes.reserve(n_labels);
  nodes.push_back({0, std::nullopt, "dom0"});
  std::deque<LabelId> frontier{0};
  while (nodes.size() < n_labels) {
    LabelId parent = frontier.front();
    frontier.pop_front();
    uint32_t children = static_cast<uint32_t>(rng.uniform_int(branch_min, branch_max));
    for (uint32_t c = 0; c < children && nodes.size() < n_labels; ++c) {
      LabelId id = static_cast<LabelId>(nodes.size());
      nodes.push_back({id, parent, "dom" + std::to_string(id)});
      frontier.push_back(id);
    }
  }
  return Taxonomy::from_nodes(std::move(nodes));
}

void write_taxonomy(std::ostream& os, const Taxonomy& t) {
  os << "taxonomy " << t.size() << "\n";
  for (size_t i = 0; i < t.size(); ++i) {
    const auto& n = t.node(static_cast<LabelId>(i));
    os << n.id << ' ';
    if (n.parent) os << *n.parent;
    else os << '-';
    os << ' ' << n.name << "\n";
  }
}

Taxonomy read_taxonomy(std::istream& is) {
  std::string tag;
  size_t n = 0;
  if (!(is >> tag >> n) || tag != "taxonomy")
    throw std::invalid_argument("taxonomy file: bad header");
  std::vector<TaxonomyNode> nodes;
  nodes.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    TaxonomyNode node;
    std::string parent;
    if (!(is >> node.id >> parent >> node.name))
      throw std::invalid_argument("taxonomy file: truncated at node " + std::to_string(i));
    if (parent != "-") node.parent = static_cast<LabelId>(std::stoul(parent));
    nodes.push_back(std::move(node));
  }
  return Taxonomy::from_nodes(std::move(nodes));
}

} // namespace atlaas
