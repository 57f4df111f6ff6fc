#pragma once

#include <cstdint>
#include <vector>

#include "atlaas/profile.hpp"
#include "atlaas/rng.hpp"
#include "atlaas/taxonomy.hpp"
#include "atlaas/zipf.hpp"

namespace atlaas {

struct DatasetParams {
  uint32_t n_labels = 200;
  uint32_t branch_min = 2;
  uint32_t branch_max = 5;
  double zipf_s = 1.0;
  uint32_t labels_per_peer = 3;
  double decay = 0.5;
};

/// One peer per profile; peer_labels keeps the pre-expansion leaf draws so
/// workloads can perturb them.
struct PeerDataset {
  Taxonomy taxonomy;
  ZipfAssignment zipf;
  double decay = 0.5;
  uint32_t labels_per_peer = 3;
  std::vector<std::vector<LabelId>> peer_labels;
  std::vector<ProfileRef> profiles;
};

/// labels_per_peer distinct leaf labels per peer, Zipf-ranked without
/// replacement, expanded over the taxonomy. Deterministic per seed.
std::vector<ProfileRef> assign_profiles(size_t n_peers, const Taxonomy& taxonomy,
                                        const ZipfAssignment& zipf,
                                        size_t labels_per_peer, uint64_t seed,
                                        double decay = 0.5,
                                        std::vector<std::vector<LabelId>>* labels_out = nullptr);

/// Taxonomy + Zipf ranking + profiles, all derived from one seed.
PeerDataset build_dataset(const DatasetParams& params, size_t n_peers, uint64_t seed);

/// Fresh profile for a peer joining mid-run; appends its labels to the dataset.
ProfileRef draw_fresh_profile(PeerDataset& ds, Rng& rng);

/// Query sample: copy a peer's leaf labels, resample one of them (distinct
/// from the rest), re-expand. Falls back to a fresh draw when the source
/// profile has no leaf support.
ProfileRef perturb_profile(const PeerDataset& ds, size_t src_peer, Rng& rng);

/// Synthetic clustered population for election and index experiments.
/// Clusters use disjoint label blocks, so inter-cluster similarity is 0 when
/// theme_overlap = 0; peers inside a cluster share the block's base labels
/// with small weight jitter (intra-cluster similarity > 0.9). With
/// themes > 1, clusters are grouped into themes; clusters of one theme share
/// the theme's base labels and differ by a per-cluster label whose weight is
/// tuned so in-theme inter-cluster similarity lands near theme_overlap.
struct PlantedClusters {
  size_t n_clusters = 0;
  std::vector<ProfileRef> profiles;
  std::vector<uint32_t> cluster_of; // per peer
};
PlantedClusters make_planted_clusters(uint64_t seed, size_t k_clusters,
                                      size_t peers_per_cluster,
                                      size_t labels_per_cluster = 8,
                                      double weight_jitter = 0.05,
                                      size_t themes = 0,
                                      double theme_overlap = 0.0);

/// Weight-jittered copy of an existing profile (multiplicative jitter,
/// re-normalized); cosine to the source stays near 1 for small jitter.
ProfileRef jitter_profile(const Profile& src, double jitter, Rng& rng);

} // namespace atlaas
