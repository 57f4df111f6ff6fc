#pragma once

#include <cstdint>
#include <vector>

#include "atlaas/gossip.hpp"
#include "atlaas/profile.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

/// Candidate advertisement piggybacked on similar-layer messages.
/// score_cycle is the cycle at which the candidate itself computed the score,
/// so receivers can distinguish fresher reports of the same candidate from
/// stale ones (and detect a dead representative by stalled freshness).
struct CandidateInfo {
  PeerId candidate = kNoPeer;
  ProfileRef profile;
  double score = 0.0;
  uint32_t score_cycle = 0;
  uint32_t epoch = 0;
};

struct ElectionState {
  PeerId candidate = kNoPeer;
  ProfileRef candidate_profile;
  double candidate_score = 0.0;
  uint32_t score_cycle = 0;
  uint32_t epoch = 0;
  /// Last cycle at which this peer learned anything new about its candidate
  /// (adoption or a fresher score report). Drives re-election on silence.
  uint32_t last_progress = 0;
  /// Cycle at which the current epoch started locally; representative status
  /// is only meaningful E_conv cycles into an epoch.
  uint32_t epoch_start = 0;
};

struct ElectionConfig {
  double tau_adopt = 0.5;
  uint32_t e_conv = 30;
  uint32_t t_repair = 10;
  uint32_t reelect_period = 100;
};

/// Mean similarity between the owner's profile and its similar view; 0 when
/// the view is empty.
double centrality_score(const Profile& own, const std::vector<ViewEntry>& similar_view);

/// (score, -id) lexicographic: higher score wins, ties go to the smaller id.
bool candidate_beats(double score_a, PeerId a, double score_b, PeerId b);

/// Start (or restart) an epoch with self-candidacy.
void election_reset(ElectionState& st, PeerId self, const ProfileRef& own_profile,
                    double own_score, uint32_t epoch, uint32_t now);

/// Max-aggregation step for one incoming advertisement. Stale epochs are
/// ignored; newer epochs reset to self first. Same-candidate reports with a
/// fresher score_cycle update the stored score; different candidates are
/// adopted iff the similarity gate passes and (score, -id) beats the current
/// candidate. Returns true if anything changed.
bool election_step(ElectionState& st, PeerId self, const Profile& own_profile,
                   const ProfileRef& own_profile_ref, double own_score,
                   const CandidateInfo& incoming, const ElectionConfig& cfg,
                   uint32_t now);

/// Per-cycle local maintenance: refresh the self-advertised score, or revert
/// to self-candidacy when the own score now beats the stored candidate.
void election_self_check(ElectionState& st, PeerId self, const ProfileRef& own_profile,
                         double own_score, uint32_t now);

bool is_representative(const ElectionState& st, PeerId self);

/// True iff the candidate's freshness has stalled for strictly more than
/// t_repair cycles.
bool reelection_trigger(uint32_t now, uint32_t last_progress, uint32_t t_repair);

CandidateInfo advertisement(const ElectionState& st);

} // namespace atlaas
