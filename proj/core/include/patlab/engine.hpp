#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include "patlab/config.hpp"
#include "patlab/errors.hpp"
#include "patlab/events.hpp"
#include "patlab/token_design.hpp"
#include "patlab/types.hpp"

namespace patlab {

struct TokenState {
    TokenRecord record;
    Balance minted = 0;
    Balance burned = 0;
    std::map<AccountId, Balance> balances;  // zero entries are pruned

    Balance supply() const { return minted - burned; }
};

enum class SlotStatus : std::uint8_t { Pending, Approved, Rejected };
enum class ClaimStatus : std::uint8_t { Open, Approved, Rejected };

std::string_view slot_status_name(SlotStatus s);
std::string_view claim_status_name(ClaimStatus s);

struct ClaimSlot {
    SlotStatus status = SlotStatus::Pending;
    std::optional<RejectCode> code;
    std::map<AccountId, bool> endorsements;  // peer-quorum verdicts so far
    std::optional<Hash32> digest;            // recorded attachment digest
};

struct ClaimState {
    std::uint64_t id = 0;
    AccountId claimant;
    TokenId token = 0;
    Balance quantity = 1;
    Tick submitted_at = 0;
    std::vector<ClaimSlot> slots;
    ClaimStatus status = ClaimStatus::Open;
};

/// A token's live registry proceeding: an application awaiting its deadline,
/// or the champion side of an open poll. At most one per token.
enum class ProceedingKind : std::uint8_t { Add, Remove, Defense };

std::string_view proceeding_kind_name(ProceedingKind k);

struct Proceeding {
    ProceedingKind kind = ProceedingKind::Add;
    AccountId proposer;
    Balance deposit = 0;  // locked from proposer; 0 for Defense
    Tick deadline = 0;    // challenge window end (Add/Remove)
    std::optional<std::uint64_t> poll;
};

struct CommitInfo {
    Hash32 commit_hash{};
    Balance stake = 0;
};

struct RevealInfo {
    VoteChoice choice = VoteChoice::Against;
    Hash32 salt{};
};

struct PollState {
    std::uint64_t id = 0;
    TokenId token = 0;
    ProceedingKind kind = ProceedingKind::Add;
    AccountId applicant;  // listing-side party (champion for Defense)
    Balance applicant_deposit = 0;
    AccountId challenger;
    Balance challenger_deposit = 0;
    Tick commit_deadline = 0;
    Tick reveal_deadline = 0;
    std::map<AccountId, CommitInfo> commits;
    std::map<AccountId, RevealInfo> reveals;
    std::optional<PollOutcome> outcome;  // set once resolved
};

/// Oracle attestation message bytes. Signatures bind the claim, the slot,
/// and the reported value; the strings are plain ASCII.
std::string sensor_message(std::uint64_t claim, std::uint64_t slot, std::int64_t measurement);
std::string location_message(std::uint64_t claim, std::uint64_t slot, std::int64_t lat_e7,
                             std::int64_t lon_e7);

/// Pure poll economics, shared by the engine and exposed for independent
/// cross-checking. Reveals carry (voter, stake, choice); For is the
/// listing/proposal side.
struct PollTally {
    Balance applicant_deposit = 0;
    Balance challenger_deposit = 0;
    std::uint32_t quorum_pct = 50;
    std::uint32_t dispensation_pct = 50;
    std::vector<std::tuple<AccountId, Balance, VoteChoice>> reveals;
};

struct PollResolution {
    PollOutcome outcome = PollOutcome::ChallengerWins;
    Balance party_cut = 0;
    std::vector<PayoutEntry> voter_rewards;  // ascending by account
    Balance returned_to_loser = 0;           // undistributed remainder when no winning reveals
};

/// Outcome: no reveals at all -> ChallengerWins; otherwise the listing side
/// wins iff For-weight * 100 >= total-weight * quorum_pct. The loser's
/// deposit D splits as floor(D * dispensation_pct / 100) to the winning
/// party and the rest pro-rata (floor) over winning revealed stakes, with
/// the rounding residue to the largest such stake (ties: lowest account).
/// With no winning reveals the remainder stays with the loser.
PollResolution resolve_tally(const PollTally& tally);

/// Per-account governance bookkeeping next to the GOV ledger balances.
/// A unit of GOV is counted once: effective = owned + in - out - locked.
struct GovAccount {
    Balance locked = 0;
    std::map<AccountId, Balance> delegated_out;  // delegatee -> amount
    std::map<AccountId, Balance> delegated_in;   // delegator -> amount

    Balance out_total() const;
    Balance in_total() const;
};

class Engine {
  public:
    static Result<Engine> create(EngineConfig cfg = {});

    /// Rebuild state from a log. Verifies the hash chain first, then
    /// re-applies every event; any structural violation is CorruptLog with
    /// the offending seq in the detail. The observer overload runs the
    /// callback after each record lands, with the engine in that prefix
    /// state.
    static Result<Engine> replay(const std::vector<EventRecord>& records);
    using ReplayObserver = std::function<void(const Engine&, const EventRecord&)>;
    static Result<Engine> replay(const std::vector<EventRecord>& records,
                                 const ReplayObserver& after_record);

    Engine(Engine&&) = default;
    Engine& operator=(Engine&&) = default;

    const EngineConfig& config() const { return config_; }
    Tick now() const { return clock_; }
    const std::vector<EventRecord>& records() const { return records_; }
    Hash32 head_hash() const { return records_.back().hash; }

    // --- ledger ---
    Result<void> transfer(TokenId token, const AccountId& from, const AccountId& to,
                          Balance amount);
    Result<void> burn_units(TokenId token, const AccountId& from, Balance amount);
    Result<Tick> advance_time(std::uint64_t ticks);
    Result<Balance> balance_of(TokenId token, const AccountId& account) const;
    Result<Balance> total_supply(TokenId token) const;

    // --- token factory ---
    Result<TokenId> create_token(const AccountId& creator, const TokenDesign& design);
    const TokenState* find_token(TokenId token) const;
    std::vector<TokenId> list_tokens(bool curated_only = false) const;
    const std::map<TokenId, TokenState>& tokens() const { return tokens_; }

    // --- claims ---
    Result<std::uint64_t> submit_claim(const AccountId& claimant, TokenId token,
                                       Balance quantity = 1);
    Result<SlotStatus> submit_attestation(const Attestation& att);
    Result<Balance> finalize_claim(std::uint64_t claim);
    const ClaimState* find_claim(std::uint64_t claim) const;
    const std::map<std::uint64_t, ClaimState>& claims() const { return claims_; }

    // --- curated registry ---
    Result<void> apply_listing(const AccountId& applicant, TokenId token, ListingKind kind);
    Result<std::uint64_t> challenge(const AccountId& challenger, TokenId token);
    /// Settles an unchallenged proceeding whose challenge window has passed.
    Result<void> update_listing(TokenId token);
    Result<void> commit_vote(const AccountId& voter, std::uint64_t poll, const Hash32& commit_hash,
                             Balance stake);
    Result<void> reveal_vote(const AccountId& voter, std::uint64_t poll, VoteChoice choice,
                             const Hash32& salt);
    Result<PollOutcome> resolve_poll(std::uint64_t poll);
    const PollState* find_poll(std::uint64_t poll) const;
    const std::map<std::uint64_t, PollState>& polls() const { return polls_; }
    const std::map<TokenId, Proceeding>& proceedings() const { return proceedings_; }
    CuratedStatus curated_status(TokenId token) const;
    bool is_listed(TokenId token) const { return registry_.count(token) != 0; }
    const std::map<TokenId, AccountId>& registry() const { return registry_; }

    /// SHA-256(choice byte || salt || decimal poll id); For = 0x01, Against = 0x00.
    static Hash32 vote_commitment(VoteChoice choice, const Hash32& salt, std::uint64_t poll);

    // --- reputation & governance ---
    Balance rep_of(const AccountId& account) const;
    Balance gov_of(const AccountId& account) const;  // owned units
    Result<Balance> claim_gov(const AccountId& account);
    Result<void> delegate_gov(const AccountId& from, const AccountId& to, Balance amount);
    Result<void> revoke_delegation(const AccountId& from, const AccountId& to, Balance amount);
    Balance effective_gov(const AccountId& account) const;
    Balance locked_gov(const AccountId& account) const;
    Balance gov_claimed(const AccountId& account) const;
    const std::map<AccountId, GovAccount>& gov_accounts() const { return gov_; }

    // --- value backing ---
    Result<Balance> deposit_to_pool(const AccountId& depositor, TokenId token, Balance amount);
    Result<Balance> swap_redeem(const AccountId& holder, TokenId token, Balance units);
    Result<Balance> mint_convert(const AccountId& holder, TokenId token, Balance amount);
    Result<void> coupled_burn(const AccountId& holder, TokenId token, Balance amount);
    Result<Balance> pool_balance(TokenId token) const;
    static AccountId pool_custody_account(TokenId token);

  private:
    Engine() = default;

    // Applies the event to state (structural validation included), then
    // appends it to the hash chain. Ops must have validated domain
    // preconditions already; a failure here is a logic error.
    void emit(Event ev);

    Result<void> apply_event(const Event& ev);

    // per-variant appliers
    Result<void> apply(const Genesis& e);
    Result<void> apply(const TimeAdvanced& e);
    Result<void> apply(const Transferred& e);
    Result<void> apply(const Burned& e);
    Result<void> apply(const TokenCreated& e);
    Result<void> apply(const RepAwarded& e);
    Result<void> apply(const ClaimSubmitted& e);
    Result<void> apply(const ProofRecorded& e);
    Result<void> apply(const SlotDecided& e);
    Result<void> apply(const ClaimFinalized& e);
    Result<void> apply(const ClaimMintDeferred& e);
    Result<void> apply(const ListingApplied& e);
    Result<void> apply(const ChallengeOpened& e);
    Result<void> apply(const ListingFinalized& e);
    Result<void> apply(const VoteCommitted& e);
    Result<void> apply(const VoteRevealed& e);
    Result<void> apply(const PollResolved& e);
    Result<void> apply(const GovClaimed& e);
    Result<void> apply(const GovDelegated& e);
    Result<void> apply(const DelegationRevoked& e);
    Result<void> apply(const PoolDeposited& e);
    Result<void> apply(const SwapRedeemed& e);
    Result<void> apply(const MintConverted& e);
    Result<void> apply(const CoupledBurned& e);

    // shared helpers
    TokenState* token_mut(TokenId id);
    Result<void> can_mint(const TokenState& t, Balance amount) const;
    void do_mint(TokenState& t, const AccountId& to, Balance amount);
    void credit(TokenState& t, const AccountId& to, Balance amount);
    void debit(TokenState& t, const AccountId& from, Balance amount);

    Result<void> check_transfer(TokenId token, const AccountId& from, Balance amount) const;
    Result<void> check_gov_lock(const AccountId& account, Balance amount) const;
    void gov_lock(const AccountId& account, Balance amount);
    void gov_unlock(const AccountId& account, Balance amount);

    /// Plans removal of `amount` GOV from `loser`, assuming `locked_override`
    /// is their lock total at execution time: owned-free units are consumed
    /// first, the remainder comes from delegations-in by ascending delegator.
    /// Returns only the delegation portion of the plan.
    std::vector<PayoutEntry> plan_seizure(const AccountId& loser, Balance amount,
                                          Balance locked_override) const;
    void gov_seize(const AccountId& loser, Balance amount, const std::vector<PayoutEntry>& plan);
    void prune_gov(const AccountId& account);

    Balance gov_entitlement(const AccountId& account) const;

    // claims machinery (claims.cpp)
    struct SlotDecision {
        bool approved = false;
        std::optional<RejectCode> code;
    };
    SlotDecision eval_window(const ClaimWindow& w, const AccountId& claimant, TokenId token,
                             std::uint64_t new_claim_id) const;
    SlotDecision eval_balance(const TokenBalanceThreshold& t, const AccountId& claimant) const;
    Balance claim_mint_amount(const ClaimState& c) const;
    bool all_slots_approved(const ClaimState& c) const;
    void try_finalize(std::uint64_t claim_id);  // emits finalize/deferred events

    PollTally tally_of(const PollState& p) const;
    void refresh_curated_status(TokenId token);
    std::vector<DesignViolation> state_violations(const TokenDesign& d) const;

    EngineConfig config_;
    Tick clock_ = 0;
    std::vector<EventRecord> records_;

    std::map<TokenId, TokenState> tokens_;
    TokenId next_token_id_ = 0;

    std::map<std::uint64_t, ClaimState> claims_;
    std::uint64_t next_claim_id_ = 0;

    std::map<TokenId, Proceeding> proceedings_;
    std::map<TokenId, AccountId> registry_;  // token -> listing owner
    std::map<std::uint64_t, PollState> polls_;
    std::uint64_t next_poll_id_ = 0;

    std::map<AccountId, GovAccount> gov_;
    std::map<AccountId, Balance> gov_claimed_;
};

}  // namespace patlab
