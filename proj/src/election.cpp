#include "atlaas/election.hpp"

namespace atlaas {

double centrality_score(const Profile& own, const std::vector<ViewEntry>& similar_view) {
  if (similar_view.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& e : similar_view) acc += similarity(own, *e.profile);
  return acc / static_cast<double>(similar_view.size());
}

bool candidate_beats(double score_a, PeerId a, double score_b, PeerId b) {
  if (score_a != score_b) return score_a > score_b;
  return a < b;
}

void election_reset(ElectionState& st, PeerId self, const ProfileRef& own_profile,
                    double own_score, uint32_t epoch, uint32_t now) {
  st.candidate = self;
  st.candidate_profile = own_profile;
  st.candidate_score = own_score;
  st.score_cycle = now;
  st.epoch = epoch;
  st.last_progress = now;
  st.epoch_start = now;
}

bool election_step(ElectionState& st, PeerId self, const Profile& own_profile,
                   const ProfileRef& own_profile_ref, double own_score,
                   const CandidateInfo& incoming, const ElectionConfig& cfg,
                   uint32_t now) {
  if (incoming.candidate == kNoPeer || !incoming.profile) return false;
  if (incoming.epoch < st.epoch) return false; // stale epoch
  bool changed = false;
  if (incoming.epoch > st.epoch) {
    election_reset(st, self, own_profile_ref, own_score, incoming.epoch, now);
    changed = true;
  }
  if (incoming.candidate == st.candidate) {
    if (incoming.score_cycle > st.score_cycle) {
      st.candidate_score = incoming.score;
      st.candidate_profile = incoming.profile;
      st.score_cycle = incoming.score_cycle;
      st.last_progress = now;
      changed = true;
    }
    return changed;
  }
  if (similarity(own_profile, *incoming.profile) < cfg.tau_adopt) return changed;
  if (!candidate_beats(incoming.score, incoming.candidate, st.candidate_score,
                       st.candidate))
    return changed;
  st.candidate = incoming.candidate;
  st.candidate_profile = incoming.profile;
  st.candidate_score = incoming.score;
  st.score_cycle = incoming.score_cycle;
  st.last_progress = now;
  return true;
}

void election_self_check(ElectionState& st, PeerId self, const ProfileRef& own_profile,
                         double own_score, uint32_t now) {
  if (st.candidate == self) {
    st.candidate_score = own_score;
    st.candidate_profile = own_profile;
    st.score_cycle = now;
    st.last_progress = now;
    return;
  }
  if (candidate_beats(own_score, self, st.candidate_score, st.candidate)) {
    st.candidate = self;
    st.candidate_profile = own_profile;
    st.candidate_score = own_score;
    st.score_cycle = now;
    st.last_progress = now;
  }
}

bool is_representative(const ElectionState& st, PeerId self) {
  return st.candidate == self;
}

bool reelection_trigger(uint32_t now, uint32_t last_progress, uint32_t t_repair) {
  return now > last_progress && now - last_progress > t_repair;
}

CandidateInfo advertisement(const ElectionState& st) {
  return {st.candidate, st.candidate_profile, st.candidate_score, st.score_cycle,
          st.epoch};
}

} // namespace atlaas
