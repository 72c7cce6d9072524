#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "patlab/config.hpp"
#include "patlab/token_design.hpp"
#include "patlab/types.hpp"

namespace patlab {

// One event variant per state-mutating operation. Field declaration order is
// the canonical serialization order; changing it changes every log hash.

enum class RepReason : std::uint8_t { TokenCreated, ClaimApproved };
enum class RejectCode : std::uint8_t {
    WindowExceeded,
    BalanceBelowThreshold,
    ApproverRejected,
    QuorumImpossible,
    MeasurementOutOfRange,
    OutsideRadius,
};
enum class ListingKind : std::uint8_t { AddToList, RemoveFromList };
enum class VoteChoice : std::uint8_t { Against = 0, For = 1 };
enum class PollOutcome : std::uint8_t { ListingWins, ChallengerWins };

std::string_view rep_reason_name(RepReason r);
std::string_view reject_code_name(RejectCode c);
std::string_view listing_kind_name(ListingKind k);
std::string_view vote_choice_name(VoteChoice c);
std::string_view poll_outcome_name(PollOutcome o);

// Claim attestation payloads. Oracle signatures cover the ASCII messages
// "sensor:<claim>:<slot>:<measurement>" and
// "location:<claim>:<slot>:<lat_e7>:<lon_e7>".

struct ApproverVerdict {
    AccountId approver;
    bool approve = false;
};
struct PeerEndorsement {
    AccountId attestor;
    bool approve = false;
};
struct OracleMeasurement {
    std::int64_t measurement = 0;
    Signature signature{};
};
struct OracleCoordinate {
    std::int64_t lat_e7 = 0;
    std::int64_t lon_e7 = 0;
    Signature signature{};
};
struct ContentDigest {
    Hash32 digest{};
};

using AttestationPayload = std::variant<ApproverVerdict, PeerEndorsement, OracleMeasurement,
                                        OracleCoordinate, ContentDigest>;

struct Attestation {
    std::uint64_t claim = 0;
    std::uint64_t slot = 0;
    AttestationPayload payload;
};

// --- events ----------------------------------------------------------------

struct Genesis {
    EngineConfig config;
};

struct TimeAdvanced {
    std::uint64_t ticks = 0;
};

struct Transferred {
    TokenId token = 0;
    AccountId from;
    AccountId to;
    Balance amount = 0;
};

struct Burned {
    TokenId token = 0;
    AccountId from;
    Balance amount = 0;
};

struct TokenCreated {
    TokenId token = 0;
    AccountId creator;
    TokenDesign design;
};

struct RepAwarded {
    AccountId account;
    Balance amount = 0;
    RepReason reason = RepReason::TokenCreated;
};

struct ClaimSubmitted {
    std::uint64_t claim = 0;
    TokenId token = 0;
    AccountId claimant;
    Balance quantity = 1;
};

struct ProofRecorded {
    std::uint64_t claim = 0;
    std::uint64_t slot = 0;
    AttestationPayload payload;
};

struct SlotDecided {
    std::uint64_t claim = 0;
    std::uint64_t slot = 0;
    bool approved = false;
    std::optional<RejectCode> code;
};

struct ClaimFinalized {
    std::uint64_t claim = 0;
    Balance minted = 0;
};

struct ClaimMintDeferred {
    std::uint64_t claim = 0;
    Balance requested = 0;
};

struct ListingApplied {
    TokenId token = 0;
    ListingKind kind = ListingKind::AddToList;
    AccountId applicant;
    Balance deposit = 0;
    Tick deadline = 0;
};

struct ChallengeOpened {
    TokenId token = 0;
    AccountId challenger;
    Balance deposit = 0;
    std::uint64_t poll = 0;
    Tick commit_deadline = 0;
    Tick reveal_deadline = 0;
};

struct ListingFinalized {
    TokenId token = 0;
    bool listed = false;
};

struct VoteCommitted {
    std::uint64_t poll = 0;
    AccountId voter;
    Hash32 commit_hash{};
    Balance stake = 0;
};

struct VoteRevealed {
    std::uint64_t poll = 0;
    AccountId voter;
    VoteChoice choice = VoteChoice::Against;
    Hash32 salt{};
};

struct PayoutEntry {
    AccountId account;
    Balance amount = 0;
};

// Payout fields are recomputed from poll state when the event is applied;
// a mismatch marks the log corrupt.
struct PollResolved {
    std::uint64_t poll = 0;
    PollOutcome outcome = PollOutcome::ListingWins;
    Balance party_cut = 0;
    std::vector<PayoutEntry> voter_rewards;
    std::vector<PayoutEntry> seized_delegations;
};

struct GovClaimed {
    AccountId account;
    Balance amount = 0;
};

struct GovDelegated {
    AccountId from;
    AccountId to;
    Balance amount = 0;
};

struct DelegationRevoked {
    AccountId from;
    AccountId to;
    Balance amount = 0;
};

struct PoolDeposited {
    TokenId token = 0;
    AccountId depositor;
    Balance amount = 0;
};

struct SwapRedeemed {
    TokenId token = 0;
    AccountId redeemer;
    Balance units = 0;
    Balance payout = 0;
};

struct MintConverted {
    TokenId token = 0;
    AccountId account;
    Balance burned = 0;
    Balance minted = 0;
};

struct CoupledBurned {
    TokenId token = 0;
    AccountId account;
    Balance amount = 0;
};

using Event = std::variant<Genesis, TimeAdvanced, Transferred, Burned, TokenCreated, RepAwarded,
                           ClaimSubmitted, ProofRecorded, SlotDecided, ClaimFinalized,
                           ClaimMintDeferred, ListingApplied, ChallengeOpened, ListingFinalized,
                           VoteCommitted, VoteRevealed, PollResolved, GovClaimed, GovDelegated,
                           DelegationRevoked, PoolDeposited, SwapRedeemed, MintConverted,
                           CoupledBurned>;

struct EventRecord {
    std::uint64_t seq = 0;
    Hash32 prev_hash{};
    Tick time = 0;
    Event event;
    Hash32 hash{};
};

}  // namespace patlab
