#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patlab/crypto.hpp"
#include "patlab/engine.hpp"

namespace patlab::sim {

/// Pinned pseudo-random stream (SplitMix64): every draw in a run comes from
/// one instance of this generator, so a scenario is a pure function of its
/// config. next() is:
///   state += 0x9e3779b97f4a7c15
///   z = state; z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next();
    /// Uniform in [0, n) by rejection, bias-free. n <= 1 returns 0 without
    /// consuming a draw.
    std::uint64_t below(std::uint64_t n);
    std::int64_t range(std::int64_t lo, std::int64_t hi);  // inclusive
    Hash32 fill32();
};

/// Exact probability num/den; keeps runs bit-reproducible where a float
/// would not be.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
};

/// Drawn as: below(den) < num.
bool chance(SplitMix64& rng, const Rational& p);

enum class BadProofStrategy : std::uint8_t { NoProof, ForgedSignature, SelfApprove };
enum class VoteRule : std::uint8_t { Truthful, Contrarian, Abstain };

std::string_view bad_proof_strategy_name(BadProofStrategy s);
std::string_view vote_rule_name(VoteRule r);

struct HonestClaimantPolicy {
    Rational action_prob;
    std::vector<TokenId> target_tokens;  // empty: any claimable token
};

struct FreeRiderPolicy {
    Rational claim_prob;
    BadProofStrategy bad_proof_strategy = BadProofStrategy::NoProof;
};

struct CreatorPolicy {
    Tick create_tick = 0;
    std::vector<TokenDesign> designs_to_create;
    /// After creating, claim GOV and spread it over Curator agents so the
    /// registry has working capital from the start.
    bool delegate_to_curators = true;
};

struct ApproverPolicy {
    Rational honesty_prob;  // probability of the truthful verdict
};

struct CuratorPolicy {
    Rational apply_prob;
    Rational challenge_prob;
    VoteRule vote_rule = VoteRule::Truthful;
};

struct OraclePolicy {
    std::uint64_t key_index = 0;  // selects the derived signing key
    std::int64_t measure_lo = 0;
    std::int64_t measure_hi = 0;
    std::int64_t lat_lo = 0;
    std::int64_t lat_hi = 0;
    std::int64_t lon_lo = 0;
    std::int64_t lon_hi = 0;
};

using AgentPolicy = std::variant<HonestClaimantPolicy, FreeRiderPolicy, CreatorPolicy,
                                 ApproverPolicy, CuratorPolicy, OraclePolicy>;

struct AgentGroup {
    AgentPolicy policy;
    std::uint64_t count = 1;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 0;
    std::uint64_t steps = 1;
    std::uint64_t metrics_interval = 1;
    EngineConfig engine;
    std::vector<TokenDesign> setup_tokens;  // created by the operator at tick 0
    std::vector<AgentGroup> agents;
};

struct MetricsFrame {
    Tick tick = 0;
    std::uint64_t claims_submitted = 0;
    std::uint64_t claims_approved = 0;
    std::uint64_t claims_rejected = 0;
    std::map<TokenId, Balance> units_minted;       // user tokens with minted > 0
    std::vector<TokenId> curated_list;             // Listed ids, ascending
    std::map<AccountId, Balance> rep_distribution;
    Balance gov_supply = 0;
    std::map<TokenId, Balance> pool_balances;      // tokens holding a swap pool
    Hash32 log_head_hash{};
};

struct RunResult {
    Engine engine;
    std::vector<MetricsFrame> frames;
    /// Ground truth for audits: which agent submitted each claim, and the
    /// policy variant index of every agent (order: groups flattened).
    std::map<std::uint64_t, std::size_t> claim_agent;
    std::vector<std::size_t> agent_policy_index;
};

/// Agent i acts under the account with index i; the setup operator uses a
/// tagged account outside that range.
AccountId agent_account(std::size_t index);
AccountId operator_account();

/// Oracle signing keys are derived, not configured: seed bytes are
/// SHA-256("oracle key <index>").
crypto::OracleKeypair oracle_keypair(std::uint64_t key_index);

Result<void> validate_scenario(const ScenarioConfig& config);

/// Plays the scenario: operator setup at tick 0, then per tick all agents
/// act in account order followed by one clock advance. A metrics frame is
/// captured whenever the clock lands on a multiple of metrics_interval and
/// at the final tick.
Result<RunResult> run(const ScenarioConfig& config);

/// Frames recomputed from a log alone; equals the run's frames for the
/// run's own log and interval. An empty record list yields no frames.
Result<std::vector<MetricsFrame>> replay(const std::vector<EventRecord>& records,
                                         std::uint64_t metrics_interval);

MetricsFrame snapshot(const Engine& engine);
std::string metrics_csv(const std::vector<MetricsFrame>& frames);

// Scenario and grid files are JSON; schemas are documented in the README.
Result<ScenarioConfig> parse_scenario(std::string_view json_text);

/// One run per grid point, seeds derived from the base seed and the point's
/// index; returns the sweep table as CSV text.
Result<std::string> run_sweep(std::string_view base_scenario_json, std::string_view grid_json);

/// Per-point derived seed: first 8 bytes, big-endian, of
/// SHA-256(base_seed as 8 big-endian bytes || grid_index as 8 big-endian bytes).
std::uint64_t sweep_seed(std::uint64_t base_seed, std::uint64_t grid_index);

}  // namespace patlab::sim
