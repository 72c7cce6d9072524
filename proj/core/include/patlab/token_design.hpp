#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "patlab/types.hpp"

namespace patlab {

// ---------------------------------------------------------------------------
// Action verifiers. A design lists verifiers in order; a claim is approved
// only when every one of them approves (conjunction).
// ---------------------------------------------------------------------------

enum class Comparator : std::uint8_t { GreaterEqual, LessEqual };

struct DesignatedApprover {
    AccountId approver;
    auto operator<=>(const DesignatedApprover&) const = default;
};

struct PeerQuorum {
    std::vector<AccountId> attestors;
    std::uint64_t quorum = 1;  // k of |attestors|
    auto operator<=>(const PeerQuorum&) const = default;
};

struct SensorOracle {
    Hash32 oracle_key{};
    Comparator comparator = Comparator::GreaterEqual;
    std::int64_t threshold = 0;
    auto operator<=>(const SensorOracle&) const = default;
};

struct LocationVerifier {
    std::int64_t center_lat_e7 = 0;
    std::int64_t center_lon_e7 = 0;
    std::uint64_t radius_m = 1;
    Hash32 oracle_key{};
    auto operator<=>(const LocationVerifier&) const = default;
};

struct TokenBalanceThreshold {
    TokenId token = 0;
    Balance min_balance = 0;
    auto operator<=>(const TokenBalanceThreshold&) const = default;
};

struct ClaimWindow {
    std::uint64_t max_claims = 1;
    std::uint64_t per_ticks = 1;
    auto operator<=>(const ClaimWindow&) const = default;
};

struct AttachmentHash {
    auto operator<=>(const AttachmentHash&) const = default;
};

using VerifierSpec =
    std::variant<DesignatedApprover, PeerQuorum, SensorOracle, LocationVerifier,
                 TokenBalanceThreshold, ClaimWindow, AttachmentHash>;

// ---------------------------------------------------------------------------
// Sources of value.
// ---------------------------------------------------------------------------

struct SwapPool {
    TokenId backing_token = 0;
    auto operator<=>(const SwapPool&) const = default;
};

struct MintConversion {
    TokenId target_token = 0;
    Balance rate_num = 1;
    Balance rate_den = 1;
    auto operator<=>(const MintConversion&) const = default;
};

struct CoupledBurn {
    TokenId coupled_token = 0;
    auto operator<=>(const CoupledBurn&) const = default;
};

struct ExternalNote {
    std::string text;
    auto operator<=>(const ExternalNote&) const = default;
};

using BackingSpec = std::variant<SwapPool, MintConversion, CoupledBurn, ExternalNote>;

// ---------------------------------------------------------------------------
// Token design.
// ---------------------------------------------------------------------------

struct SupplyCapped {
    Balance max = 0;
    auto operator<=>(const SupplyCapped&) const = default;
};
struct SupplyUncapped {
    auto operator<=>(const SupplyUncapped&) const = default;
};
using SupplyPolicy = std::variant<SupplyCapped, SupplyUncapped>;

/// Creation conditions other than Action tie token creation to consensus
/// participation, which needs permission rights this engine does not model;
/// validate_design rejects them.
enum class CreationCondition : std::uint8_t { Action, Consensus, Both };

struct PremintNone {
    auto operator<=>(const PremintNone&) const = default;
};
struct PremintPartial {
    Balance amount = 0;
    AccountId to;
    auto operator<=>(const PremintPartial&) const = default;
};
struct PremintAll {
    Balance amount = 0;
    AccountId to;
    auto operator<=>(const PremintAll&) const = default;
};
using UnconditionalCreation = std::variant<PremintNone, PremintPartial, PremintAll>;

struct FixedPerClaim {
    Balance units = 1;
    auto operator<=>(const FixedPerClaim&) const = default;
};
struct ProportionalToQuantity {
    Balance unit_per_quantity = 1;
    auto operator<=>(const ProportionalToQuantity&) const = default;
};
using MintingPolicy = std::variant<FixedPerClaim, ProportionalToQuantity>;

struct TokenDesign {
    std::string name;
    std::string symbol;  // 1-8 uppercase ASCII letters
    SupplyPolicy supply = SupplyUncapped{};
    bool burnable = false;
    bool transferable = true;
    CreationCondition creation_condition = CreationCondition::Action;
    UnconditionalCreation unconditional_creation = PremintNone{};
    MintingPolicy minting_policy = FixedPerClaim{1};
    std::vector<VerifierSpec> verifiers;
    std::vector<BackingSpec> sources_of_value;

    auto operator<=>(const TokenDesign&) const = default;
};

enum class DesignViolation : std::uint8_t {
    EmptyName,
    NameTooLong,
    InvalidUtf8,
    BadSymbol,
    CreationConditionUnsupported,
    PreMintExceedsCap,
    PremintWithVerifiers,
    BadMintingPolicy,
    BadPeerQuorum,
    BadSensorOracle,
    BadLocationRadius,
    BadClaimWindow,
    BadConversionRate,
    // creation-time checks against registry state
    UnknownReferencedToken,
    SystemTokenReference,
};

std::string_view violation_name(DesignViolation v);
std::string_view comparator_name(Comparator c);
std::string_view creation_condition_name(CreationCondition c);

/// Pure structural validation; every violated invariant is listed.
/// State-dependent checks (referenced tokens exist) happen at creation.
std::vector<DesignViolation> validate_design(const TokenDesign& design);

/// Curation status of a registered token, maintained by the registry.
enum class CuratedStatus : std::uint8_t { NotListed, Applied, Listed, Challenged };

std::string_view curated_status_name(CuratedStatus s);

struct TokenRecord {
    TokenId id = 0;
    TokenDesign design;
    AccountId creator;
    Tick created_at = 0;
    CuratedStatus curated_status = CuratedStatus::NotListed;
};

}  // namespace patlab
