#pragma once

#include <cstdint>
#include <string_view>

#include "patlab/errors.hpp"
#include "patlab/types.hpp"

namespace patlab {

struct RepConfig {
    Balance rep_per_creation = 100;
    Balance rep_per_claim = 10;
    Balance gov_threshold = 100;  // REP per entitlement level
    Balance gov_per_level = 10;

    auto operator<=>(const RepConfig&) const = default;
};

struct TcrParams {
    Balance min_deposit = 10;  // GOV
    std::uint64_t apply_stage_ticks = 100;
    std::uint64_t commit_stage_ticks = 100;
    std::uint64_t reveal_stage_ticks = 100;
    std::uint32_t vote_quorum_pct = 50;
    std::uint32_t dispensation_pct = 50;

    auto operator<=>(const TcrParams&) const = default;
};

enum class BurnSource : std::uint8_t { Custody, Holder };

std::string_view burn_source_name(BurnSource s);

struct EngineConfig {
    RepConfig rep;
    TcrParams tcr;
    bool gov_transferable = false;
    BurnSource coupled_burn_source = BurnSource::Custody;

    auto operator<=>(const EngineConfig&) const = default;
};

/// Rejects zero stage lengths, zero REP/GOV parameters, and percentages
/// above 100; the error detail names the offending field.
Result<void> validate_config(const EngineConfig& cfg);

}  // namespace patlab
