#include "atlaas/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atlaas {

std::vector<ProfileRef> assign_profiles(size_t n_peers, const Taxonomy& taxonomy,
                                        const ZipfAssignment& zipf,
                                        size_t labels_per_peer, uint64_t seed,
                                        double decay,
                                        std::vector<std::vector<LabelId>>* labels_out) {
  if (n_peers < 1) throw std::invalid_argument("assign_profiles: n_peers >= 1");
  if (labels_per_peer < 1) throw std::invalid_argument("assign_profiles: labels_per_peer >= 1");
  if (taxonomy.leaves().size() < labels_per_peer)
    throw std::invalid_argument("assign_profiles: not enough leaves");

  Rng rng(seed ^ 0xa551);
  std::vector<ProfileRef> out;
  out.reserve(n_peers);
  for (size_t i = 0; i < n_peers; ++i) {
    auto labels = zipf.sample_distinct(rng, labels_per_peer);
    std::vector<std::pair<LabelId, double>> weighted;
    weighted.reserve(labels.size());
    for (LabelId l : labels) weighted.emplace_back(l, 1.0);
    out.push_back(std::make_shared<const Profile>(
        expand_profile(weighted, taxonomy, decay)));
    if (labels_out) labels_out->push_back(std::move(labels));
  }
  return out;
}

PeerDataset build_dataset(const DatasetParams& params, size_t n_peers, uint64_t seed) {
  Taxonomy taxonomy =
      generate_taxonomy(seed, params.n_labels, params.branch_min, params.branch_max);
  std::vector<LabelId> ranked = taxonomy.leaves();
  Rng rank_rng(seed ^ 0x21f);
  rank_rng.shuffle(ranked);
  ZipfAssignment zipf(params.zipf_s, std::move(ranked));
  PeerDataset ds{std::move(taxonomy), std::move(zipf), params.decay,
                 params.labels_per_peer, {}, {}};
  ds.profiles = assign_profiles(n_peers, ds.taxonomy, ds.zipf, params.labels_per_peer,
                                seed, params.decay, &ds.peer_labels);
  return ds;
}

ProfileRef draw_fresh_profile(PeerDataset& ds, Rng& rng) {
  auto labels = ds.zipf.sample_distinct(rng, ds.labels_per_peer);
  std::vector<std::pair<LabelId, double>> weighted;
  for (LabelId l : labels) weighted.emplace_back(l, 1.0);
  auto prof = std::make_shared<const Profile>(expand_profile(weighted, ds.taxonomy, ds.decay));
  ds.peer_labels.push_back(std::move(labels));
  ds.profiles.push_back(prof);
  return prof;
}

ProfileRef perturb_profile(const PeerDataset& ds, size_t src_peer, Rng& rng) {
  if (src_peer >= ds.peer_labels.size() || ds.peer_labels[src_peer].empty()) {
    PeerDataset& mut = const_cast<PeerDataset&>(ds);
    return draw_fresh_profile(mut, rng);
  }
  std::vector<LabelId> labels = ds.peer_labels[src_peer];
  size_t slot = static_cast<size_t>(rng.uniform_u64(labels.size()));
  for (int attempt = 0; attempt < 64; ++attempt) {
    LabelId fresh = ds.zipf.sample(rng);
    if (std::find(labels.begin(), labels.end(), fresh) == labels.end()) {
      labels[slot] = fresh;
      break;
    }
  }
  std::vector<std::pair<LabelId, double>> weighted;
  for (LabelId l : labels) weighted.emplace_back(l, 1.0);
  return std::make_shared<const Profile>(expand_profile(weighted, ds.taxonomy, ds.decay));
}

ProfileRef jitter_profile(const Profile& src, double jitter, Rng& rng) {
  std::vector<Profile::Entry> w = src.weights();
  for (auto& [id, v] : w) v *= 1.0 + jitter * rng.uniform(-1.0, 1.0);
  return std::make_shared<const Profile>(Profile::from_weights(std::move(w)).normalized());
}

PlantedClusters make_planted_clusters(uint64_t seed, size_t k_clusters,
                                      size_t peers_per_cluster,
                                      size_t labels_per_cluster,
                                      double weight_jitter, size_t themes,
                                      double theme_overlap) {
  if (k_clusters < 1 || peers_per_cluster < 1 || labels_per_cluster < 1)
    throw std::invalid_argument("planted_clusters: counts must be >= 1");
  Rng rng(seed ^ 0xc1a5);
  PlantedClusters out;
  out.n_clusters = k_clusters;

  // Cluster centers. Without themes each cluster owns a disjoint label block.
  // With themes, clusters of one theme share the theme's base labels plus a
  // per-cluster label weighted so in-theme center similarity is theme_overlap:
  //   cos = B / (B + v^2)  =>  v = sqrt(B (1 - rho) / rho)
  std::vector<std::vector<Profile::Entry>> centers(k_clusters);
  if (themes == 0) {
    for (size_t c = 0; c < k_clusters; ++c) {
      LabelId base = static_cast<LabelId>(c * labels_per_cluster);
      for (size_t l = 0; l < labels_per_cluster; ++l)
        centers[c].emplace_back(base + static_cast<LabelId>(l), 1.0);
    }
  } else {
    if (!(theme_overlap > 0.0 && theme_overlap < 1.0))
      throw std::invalid_argument("planted_clusters: theme_overlap must be in (0,1)");
    size_t per_theme = (k_clusters + themes - 1) / themes;
    double v = std::sqrt(static_cast<double>(labels_per_cluster) *
                         (1.0 - theme_overlap) / theme_overlap);
    size_t theme_span = labels_per_cluster + per_theme;
    for (size_t c = 0; c < k_clusters; ++c) {
      size_t theme = c / per_theme;
      size_t slot = c % per_theme;
      LabelId base = static_cast<LabelId>(theme * theme_span);
      for (size_t l = 0; l < labels_per_cluster; ++l)
        centers[c].emplace_back(base + static_cast<LabelId>(l), 1.0);
      centers[c].emplace_back(base + static_cast<LabelId>(labels_per_cluster + slot), v);
    }
  }

  for (size_t c = 0; c < k_clusters; ++c) {
    Profile center = Profile::from_weights(centers[c]);
    for (size_t p = 0; p < peers_per_cluster; ++p) {
      out.profiles.push_back(jitter_profile(center, weight_jitter, rng));
      out.cluster_of.push_back(static_cast<uint32_t>(c));
    }
  }
  return out;
}

} // namespace atlaas
