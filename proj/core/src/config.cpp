#include "patlab/config.hpp"

namespace patlab {

Result<void> validate_config(const EngineConfig& cfg) {
    auto bad = [](const char* field) {
        return Result<void>{Errc::InvalidConfig, field};
    };
    if (cfg.rep.rep_per_creation < 1) return bad("rep.rep_per_creation");
    if (cfg.rep.rep_per_claim < 1) return bad("rep.rep_per_claim");
    if (cfg.rep.gov_threshold < 1) return bad("rep.gov_threshold");
    if (cfg.rep.gov_per_level < 1) return bad("rep.gov_per_level");
    if (cfg.tcr.min_deposit < 1) return bad("tcr.min_deposit");
    if (cfg.tcr.apply_stage_ticks < 1) return bad("tcr.apply_stage_ticks");
    if (cfg.tcr.commit_stage_ticks < 1) return bad("tcr.commit_stage_ticks");
    if (cfg.tcr.reveal_stage_ticks < 1) return bad("tcr.reveal_stage_ticks");
    if (cfg.tcr.vote_quorum_pct > 100) return bad("tcr.vote_quorum_pct");
    if (cfg.tcr.dispensation_pct > 100) return bad("tcr.dispensation_pct");
    return {};
}

}  // namespace patlab
