#include "atlaas/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace atlaas {

Profile Profile::from_weights(std::vector<Entry> weights) {
  if (weights.empty()) throw std::invalid_argument("profile: empty");
  std::sort(weights.begin(), weights.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  // merge duplicates in place
  size_t out = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (out > 0 && weights[out - 1].first == weights[i].first) {
      weights[out - 1].second += weights[i].second;
    } else {
      weights[out++] = weights[i];
    }
  }
  weights.resize(out);
  double sq = 0.0;
  for (const auto& [id, w] : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("profile: weights must be > 0");
    sq += w * w;
  }
  Profile p;
  p.weights_ = std::move(weights);
  p.norm_ = std::sqrt(sq);
  return p;
}

double Profile::weight(LabelId id) const {
  auto it = std::lower_bound(
      weights_.begin(), weights_.end(), id,
      [](const Entry& e, LabelId v) { return e.first < v; });
  return (it != weights_.end() && it->first == id) ? it->second : 0.0;
}

Profile Profile::normalized() const {
  std::vector<Entry> w = weights_;
  for (auto& [id, v] : w) v /= norm_;
  return from_weights(std::move(w));
}

double dot(const Profile& p, const Profile& q) {
  const auto& a = p.weights();
  const auto& b = q.weights();
  double acc = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) ++i;
    else if (b[j].first < a[i].first) ++j;
    else acc += a[i++].second * b[j++].second;
  }
  return acc;
}

double similarity(const Profile& p, const Profile& q) {
  return dot(p, q) / (p.norm() * q.norm());
}

Profile expand_profile(std::span<const std::pair<LabelId, double>> labels,
                       const Taxonomy& taxonomy, double decay) {
  if (labels.empty()) throw std::invalid_argument("expand_profile: empty label list");
  if (!(decay > 0.0 && decay <= 1.0))
    throw std::invalid_argument("expand_profile: decay must be in (0,1]");
  std::map<LabelId, double> acc;
  for (const auto& [label, w] : labels) {
    if (!taxonomy.has_label(label))
      throw std::invalid_argument("expand_profile: unknown label " + std::to_string(label));
    if (!(w > 0.0)) throw std::invalid_argument("expand_profile: weights must be > 0");
    double contrib = w;
    LabelId cur = label;
    acc[cur] += contrib;
    while (taxonomy.node(cur).parent) {
      cur = *taxonomy.node(cur).parent;
      contrib *= decay;
      acc[cur] += contrib;
    }
  }
  std::vector<Profile::Entry> w(acc.begin(), acc.end());
  return Profile::from_weights(std::move(w)).normalized();
}

std::vector<std::pair<PeerId, double>> brute_force_top_k(
    const Profile& sample,
    std::span<const std::pair<PeerId, ProfileRef>> population, size_t k) {
  if (k < 1) throw std::invalid_argument("brute_force_top_k: k >= 1");
  std::vector<std::pair<PeerId, double>> scored;
  scored.reserve(population.size());
  for (const auto& [id, prof] : population)
    scored.emplace_back(id, similarity(sample, *prof));
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

void write_profiles(std::ostream& os,
                    std::span<const std::pair<PeerId, ProfileRef>> profiles) {
  os << "profiles " << profiles.size() << "\n";
  char buf[64];
  for (const auto& [id, prof] : profiles) {
    os << id;
    for (const auto& [label, w] : prof->weights()) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", label, w);
      os << buf;
    }
    os << "\n";
  }
}

std::vector<std::pair<PeerId, ProfileRef>> read_profiles(std::istream& is) {
  std::string tag;
  size_t n = 0;
  if (!(is >> tag >> n) || tag != "profiles")
    throw std::invalid_argument("profiles file: bad header");
  std::string rest;
  std::getline(is, rest);
  std::vector<std::pair<PeerId, ProfileRef>> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(is, line))
      throw std::invalid_argument("profiles file: truncated at line " + std::to_string(i));
    std::istringstream ls(line);
    PeerId id;
    if (!(ls >> id)) throw std::invalid_argument("profiles file: bad peer id");
    std::vector<Profile::Entry> w;
    std::string pair;
    while (ls >> pair) {
      size_t colon = pair.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("profiles file: bad entry '" + pair + "'");
      w.emplace_back(static_cast<LabelId>(std::stoul(pair.substr(0, colon))),
                     std::stod(pair.substr(colon + 1)));
    }
    out.emplace_back(id, std::make_shared<const Profile>(Profile::from_weights(std::move(w))));
  }
  return out;
}

} // namespace atlaas
