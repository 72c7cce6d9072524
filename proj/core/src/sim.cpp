#include "patlab/sim.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "patlab/event_codec.hpp"

namespace patlab::sim {

using njson = nlohmann::json;

// --- pinned randomness ------------------------------------------------------

std::uint64_t SplitMix64::next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t rem = (0ull - n) % n;  // 2^64 mod n
    if (rem == 0) return next() % n;
    std::uint64_t limit = 0ull - rem;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
}

std::int64_t SplitMix64::range(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span));
}

Hash32 SplitMix64::fill32() {
    Hash32 h{};
    for (int w = 0; w < 4; ++w) {
        std::uint64_t v = next();
        for (int b = 0; b < 8; ++b) h[w * 8 + b] = static_cast<std::uint8_t>(v >> (56 - 8 * b));
    }
    return h;
}

bool chance(SplitMix64& rng, const Rational& p) { return rng.below(p.den) < p.num; }

std::string_view bad_proof_strategy_name(BadProofStrategy s) {
    switch (s) {
        case BadProofStrategy::NoProof: return "NoProof";
        case BadProofStrategy::ForgedSignature: return "ForgedSignature";
        case BadProofStrategy::SelfApprove: return "SelfApprove";
    }
    return "?";
}

std::string_view vote_rule_name(VoteRule r) {
    switch (r) {
        case VoteRule::Truthful: return "truthful";
        case VoteRule::Contrarian: return "contrarian";
        case VoteRule::Abstain: return "abstain";
    }
    return "?";
}

// --- fixed accounts and keys ------------------------------------------------

AccountId agent_account(std::size_t index) {
    return AccountId::from_index(static_cast<std::uint64_t>(index));
}

AccountId operator_account() {
    AccountId a;
    a.bytes = crypto::sha256("operator");
    return a;
}

crypto::OracleKeypair oracle_keypair(std::uint64_t key_index) {
    return crypto::keypair_from_seed(crypto::sha256("oracle key " + std::to_string(key_index)));
}

std::uint64_t sweep_seed(std::uint64_t base_seed, std::uint64_t grid_index) {
    std::uint8_t buf[16];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(base_seed >> (56 - 8 * i));
    for (int i = 0; i < 8; ++i) buf[8 + i] = static_cast<std::uint8_t>(grid_index >> (56 - 8 * i));
    Hash32 h = crypto::sha256(buf, sizeof buf);
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = (s << 8) | h[i];
    return s;
}

// --- validation -------------------------------------------------------------

namespace {

Result<void> check_rational(const Rational& p, const std::string& path) {
    if (p.den == 0) return {Errc::InvalidConfig, path + ": zero denominator"};
    if (p.num > p.den) return {Errc::InvalidConfig, path + ": probability above one"};
    return {};
}

std::string join_violations(const std::vector<DesignViolation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += ", ";
        out += violation_name(v);
    }
    return out;
}

}  // namespace

Result<void> validate_scenario(const ScenarioConfig& config) {
    if (config.steps < 1) return {Errc::InvalidConfig, "steps"};
    if (config.metrics_interval < 1) return {Errc::InvalidConfig, "metrics_interval"};
    if (auto c = validate_config(config.engine); !c.ok())
        return {Errc::InvalidConfig, "engine." + c.error().detail};
    std::uint64_t total = 0;
    for (std::size_t g = 0; g < config.agents.size(); ++g) {
        const AgentGroup& grp = config.agents[g];
        const std::string path = "agents[" + std::to_string(g) + "]";
        if (grp.count < 1) return {Errc::InvalidConfig, path + ".count"};
        total += grp.count;
        if (const auto* hc = std::get_if<HonestClaimantPolicy>(&grp.policy)) {
            if (auto c = check_rational(hc->action_prob, path + ".action_prob"); !c.ok()) return c;
        } else if (const auto* fr = std::get_if<FreeRiderPolicy>(&grp.policy)) {
            if (auto c = check_rational(fr->claim_prob, path + ".claim_prob"); !c.ok()) return c;
        } else if (const auto* cr = std::get_if<CreatorPolicy>(&grp.policy)) {
            for (std::size_t d = 0; d < cr->designs_to_create.size(); ++d) {
                auto vs = validate_design(cr->designs_to_create[d]);
                if (!vs.empty())
                    return {Errc::InvalidConfig, path + ".designs[" + std::to_string(d) +
                                                     "]: " + join_violations(vs)};
            }
        } else if (const auto* ap = std::get_if<ApproverPolicy>(&grp.policy)) {
            if (auto c = check_rational(ap->honesty_prob, path + ".honesty_prob"); !c.ok())
                return c;
        } else if (const auto* cu = std::get_if<CuratorPolicy>(&grp.policy)) {
            if (auto c = check_rational(cu->apply_prob, path + ".apply_prob"); !c.ok()) return c;
            if (auto c = check_rational(cu->challenge_prob, path + ".challenge_prob"); !c.ok())
                return c;
        } else if (const auto* oc = std::get_if<OraclePolicy>(&grp.policy)) {
            if (oc->measure_lo > oc->measure_hi)
                return {Errc::InvalidConfig, path + ".measurement_range"};
            if (oc->lat_lo > oc->lat_hi) return {Errc::InvalidConfig, path + ".lat_range"};
            if (oc->lon_lo > oc->lon_hi) return {Errc::InvalidConfig, path + ".lon_range"};
        }
    }
    if (total == 0) return {Errc::InvalidConfig, "agents: at least one agent"};
    for (std::size_t i = 0; i < config.setup_tokens.size(); ++i) {
        auto vs = validate_design(config.setup_tokens[i]);
        if (!vs.empty())
            return {Errc::InvalidConfig,
                    "setup_tokens[" + std::to_string(i) + "]: " + join_violations(vs)};
    }
    return {};
}

// --- metrics ----------------------------------------------------------------

MetricsFrame snapshot(const Engine& engine) {
    MetricsFrame f;
    f.tick = engine.now();
    for (const auto& [id, c] : engine.claims()) {
        ++f.claims_submitted;
        if (c.status == ClaimStatus::Approved) ++f.claims_approved;
        if (c.status == ClaimStatus::Rejected) ++f.claims_rejected;
    }
    for (const auto& [id, t] : engine.tokens()) {
        if (is_system_token(id)) continue;
        if (t.minted > 0) f.units_minted[id] = t.minted;
        if (auto pool = engine.pool_balance(id); pool.ok()) f.pool_balances[id] = pool.value();
    }
    f.curated_list = engine.list_tokens(true);
    f.rep_distribution = engine.tokens().at(kRepTokenId).balances;
    f.gov_supply = engine.total_supply(kGovTokenId).value();
    f.log_head_hash = engine.head_hash();
    return f;
}

std::string metrics_csv(const std::vector<MetricsFrame>& frames) {
    std::string out =
        "tick,claims_submitted,claims_approved,claims_rejected,gov_supply,"
        "units_minted,curated_list,rep_distribution,pool_balances,log_head_hash\n";
    for (const MetricsFrame& f : frames) {
        out += std::to_string(f.tick);
        out += ',';
        out += std::to_string(f.claims_submitted);
        out += ',';
        out += std::to_string(f.claims_approved);
        out += ',';
        out += std::to_string(f.claims_rejected);
        out += ',';
        out += std::to_string(f.gov_supply);
        out += ',';
        bool first = true;
        for (const auto& [id, amt] : f.units_minted) {
            if (!first) out += ';';
            first = false;
            out += std::to_string(id) + ":" + std::to_string(amt);
        }
        out += ',';
        first = true;
        for (TokenId id : f.curated_list) {
            if (!first) out += ';';
            first = false;
            out += std::to_string(id);
        }
        out += ',';
        first = true;
        for (const auto& [acct, amt] : f.rep_distribution) {
            if (!first) out += ';';
            first = false;
            out += acct.hex() + ":" + std::to_string(amt);
        }
        out += ',';
        first = true;
        for (const auto& [id, amt] : f.pool_balances) {
            if (!first) out += ';';
            first = false;
            out += std::to_string(id) + ":" + std::to_string(amt);
        }
        out += ',';
        out += to_hex(f.log_head_hash.data(), f.log_head_hash.size());
        out += '\n';
    }
    return out;
}

// --- the simulator ----------------------------------------------------------

namespace {

struct AgentRt {
    std::size_t index = 0;
    AccountId account;
    const AgentPolicy* policy = nullptr;
    // curator bookkeeping: committed but unrevealed votes
    std::map<std::uint64_t, std::pair<VoteChoice, Hash32>> pending_reveals;
    std::optional<crypto::OracleKeypair> oracle_kp;  // oracle agents
    std::optional<crypto::OracleKeypair> forged_kp;  // free riders forging proofs
};

class Simulator {
  public:
    Simulator(const ScenarioConfig& cfg, Engine eng)
        : cfg_(cfg), eng_(std::move(eng)), rng_{cfg.seed} {
        std::size_t idx = 0;
        for (const AgentGroup& grp : cfg_.agents) {
            for (std::uint64_t k = 0; k < grp.count; ++k) {
                AgentRt a;
                a.index = idx;
                a.account = agent_account(idx);
                a.policy = &grp.policy;
                if (const auto* op = std::get_if<OraclePolicy>(&grp.policy))
                    a.oracle_kp = oracle_keypair(op->key_index);
                if (std::holds_alternative<FreeRiderPolicy>(grp.policy))
                    a.forged_kp = crypto::keypair_from_seed(
                        crypto::sha256("forged key " + std::to_string(idx)));
                policy_index_.push_back(grp.policy.index());
                if (std::holds_alternative<CuratorPolicy>(grp.policy))
                    curators_.push_back(agent_account(idx));
                agents_.push_back(std::move(a));
                ++idx;
            }
        }
    }

    Result<RunResult> play() {
        for (const TokenDesign& d : cfg_.setup_tokens) {
            auto created = eng_.create_token(operator_account(), d);
            if (!created.ok()) {
                Error e = created.error();
                e.detail = "setup token '" + d.symbol + "': " + e.detail;
                return e;
            }
        }
        std::vector<MetricsFrame> frames;
        for (Tick t = 0; t < cfg_.steps; ++t) {
            for (AgentRt& a : agents_) act(a, t);
            auto advanced = eng_.advance_time(1);
            if (!advanced.ok()) return advanced.error();
            Tick now = eng_.now();
            if (now % cfg_.metrics_interval == 0 || now == cfg_.steps)
                frames.push_back(snapshot(eng_));
        }
        RunResult rr{std::move(eng_), std::move(frames), std::move(claim_agent_),
                     std::move(policy_index_)};
        return rr;
    }

  private:
    bool claim_is_genuine(std::uint64_t claim) const {
        auto it = claim_agent_.find(claim);
        if (it == claim_agent_.end()) return true;
        return policy_index_[it->second] != 1;  // FreeRiderPolicy variant slot
    }

    std::vector<TokenId> claimable_tokens(const std::vector<TokenId>& targets) const {
        std::vector<TokenId> out;
        for (const auto& [id, t] : eng_.tokens()) {
            if (is_system_token(id)) continue;
            if (std::holds_alternative<PremintAll>(t.record.design.unconditional_creation))
                continue;
            if (!targets.empty() && std::find(targets.begin(), targets.end(), id) == targets.end())
                continue;
            out.push_back(id);
        }
        return out;
    }

    void serve_own_attachments(std::uint64_t claim) {
        const ClaimState* c = eng_.find_claim(claim);
        if (!c || c->status != ClaimStatus::Open) return;
        const TokenDesign& d = eng_.find_token(c->token)->record.design;
        for (std::size_t s = 0; s < d.verifiers.size(); ++s) {
            if (!std::holds_alternative<AttachmentHash>(d.verifiers[s])) continue;
            if (eng_.find_claim(claim)->slots[s].status != SlotStatus::Pending) continue;
            ContentDigest digest{crypto::sha256("attachment " + std::to_string(claim))};
            (void)eng_.submit_attestation({claim, s, digest});
        }
    }

    void act(AgentRt& a, Tick t) {
        if (const auto* p = std::get_if<HonestClaimantPolicy>(a.policy))
            act_claimant(a, *p);
        else if (const auto* p = std::get_if<FreeRiderPolicy>(a.policy))
            act_free_rider(a, *p);
        else if (const auto* p = std::get_if<CreatorPolicy>(a.policy))
            act_creator(a, *p, t);
        else if (const auto* p = std::get_if<ApproverPolicy>(a.policy))
            act_approver(a, *p);
        else if (const auto* p = std::get_if<CuratorPolicy>(a.policy))
            act_curator(a, *p);
        else if (const auto* p = std::get_if<OraclePolicy>(a.policy))
            act_oracle(a, *p);
    }

    void act_claimant(AgentRt& a, const HonestClaimantPolicy& p) {
        if (!chance(rng_, p.action_prob)) return;
        auto candidates = claimable_tokens(p.target_tokens);
        if (candidates.empty()) return;
        TokenId token = candidates[rng_.below(candidates.size())];
        Balance quantity = 1;
        const TokenDesign& d = eng_.find_token(token)->record.design;
        if (std::holds_alternative<ProportionalToQuantity>(d.minting_policy))
            quantity = 1 + rng_.below(3);
        auto submitted = eng_.submit_claim(a.account, token, quantity);
        if (!submitted.ok()) return;
        claim_agent_[submitted.value()] = a.index;
        serve_own_attachments(submitted.value());
    }

    void act_free_rider(AgentRt& a, const FreeRiderPolicy& p) {
        if (!chance(rng_, p.claim_prob)) return;
        auto candidates = claimable_tokens({});
        if (candidates.empty()) return;
        TokenId token = candidates[rng_.below(candidates.size())];
        auto submitted = eng_.submit_claim(a.account, token, 1);
        if (!submitted.ok()) return;
        std::uint64_t claim = submitted.value();
        claim_agent_[claim] = a.index;
        if (p.bad_proof_strategy == BadProofStrategy::NoProof) return;

        serve_own_attachments(claim);
        const ClaimState* c = eng_.find_claim(claim);
        if (!c || c->status != ClaimStatus::Open) return;
        const TokenDesign& d = eng_.find_token(c->token)->record.design;
        for (std::size_t s = 0; s < d.verifiers.size(); ++s) {
            if (eng_.find_claim(claim)->status != ClaimStatus::Open) break;
            if (eng_.find_claim(claim)->slots[s].status != SlotStatus::Pending) continue;
            const VerifierSpec& spec = d.verifiers[s];
            if (p.bad_proof_strategy == BadProofStrategy::ForgedSignature) {
                if (const auto* so = std::get_if<SensorOracle>(&spec)) {
                    Signature sig = crypto::sign(*a.forged_kp,
                                                 sensor_message(claim, s, so->threshold));
                    (void)eng_.submit_attestation({claim, s, OracleMeasurement{so->threshold, sig}});
                } else if (const auto* lv = std::get_if<LocationVerifier>(&spec)) {
                    Signature sig = crypto::sign(
                        *a.forged_kp,
                        location_message(claim, s, lv->center_lat_e7, lv->center_lon_e7));
                    (void)eng_.submit_attestation(
                        {claim, s, OracleCoordinate{lv->center_lat_e7, lv->center_lon_e7, sig}});
                }
            } else {  // SelfApprove
                if (std::holds_alternative<DesignatedApprover>(spec))
                    (void)eng_.submit_attestation({claim, s, ApproverVerdict{a.account, true}});
                else if (std::holds_alternative<PeerQuorum>(spec))
                    (void)eng_.submit_attestation({claim, s, PeerEndorsement{a.account, true}});
            }
        }
    }

    void act_creator(AgentRt& a, const CreatorPolicy& p, Tick t) {
        if (t != p.create_tick) return;
        for (const TokenDesign& d : p.designs_to_create) (void)eng_.create_token(a.account, d);
        (void)eng_.claim_gov(a.account);
        if (!p.delegate_to_curators || curators_.empty()) return;
        Balance owned = eng_.gov_of(a.account);
        Balance share = owned / curators_.size();
        if (share == 0) return;
        for (const AccountId& curator : curators_)
            (void)eng_.delegate_gov(a.account, curator, share);
    }

    void act_approver(AgentRt& a, const ApproverPolicy& p) {
        struct Target {
            std::uint64_t claim;
            std::uint64_t slot;
            bool peer;
        };
        std::vector<Target> targets;
        for (const auto& [cid, c] : eng_.claims()) {
            if (c.status != ClaimStatus::Open) continue;
            const TokenDesign& d = eng_.find_token(c.token)->record.design;
            for (std::size_t s = 0; s < c.slots.size(); ++s) {
                if (c.slots[s].status != SlotStatus::Pending) continue;
                if (const auto* da = std::get_if<DesignatedApprover>(&d.verifiers[s])) {
                    if (da->approver == a.account) targets.push_back({cid, s, false});
                } else if (const auto* pq = std::get_if<PeerQuorum>(&d.verifiers[s])) {
                    if (std::find(pq->attestors.begin(), pq->attestors.end(), a.account) !=
                            pq->attestors.end() &&
                        c.slots[s].endorsements.count(a.account) == 0)
                        targets.push_back({cid, s, true});
                }
            }
        }
        for (const Target& tg : targets) {
            bool truthful = claim_is_genuine(tg.claim);
            bool verdict = chance(rng_, p.honesty_prob) ? truthful : !truthful;
            if (tg.peer)
                (void)eng_.submit_attestation(
                    {tg.claim, tg.slot, PeerEndorsement{a.account, verdict}});
            else
                (void)eng_.submit_attestation(
                    {tg.claim, tg.slot, ApproverVerdict{a.account, verdict}});
        }
    }

    void act_oracle(AgentRt& a, const OraclePolicy& p) {
        struct Target {
            std::uint64_t claim;
            std::uint64_t slot;
            bool location;
        };
        std::vector<Target> targets;
        const Hash32& my_key = a.oracle_kp->public_key;
        for (const auto& [cid, c] : eng_.claims()) {
            if (c.status != ClaimStatus::Open) continue;
            if (!claim_is_genuine(cid)) continue;  // nothing real to measure
            const TokenDesign& d = eng_.find_token(c.token)->record.design;
            for (std::size_t s = 0; s < c.slots.size(); ++s) {
                if (c.slots[s].status != SlotStatus::Pending) continue;
                if (const auto* so = std::get_if<SensorOracle>(&d.verifiers[s])) {
                    if (so->oracle_key == my_key) targets.push_back({cid, s, false});
                } else if (const auto* lv = std::get_if<LocationVerifier>(&d.verifiers[s])) {
                    if (lv->oracle_key == my_key) targets.push_back({cid, s, true});
                }
            }
        }
        for (const Target& tg : targets) {
            if (tg.location) {
                std::int64_t lat = rng_.range(p.lat_lo, p.lat_hi);
                std::int64_t lon = rng_.range(p.lon_lo, p.lon_hi);
                Signature sig =
                    crypto::sign(*a.oracle_kp, location_message(tg.claim, tg.slot, lat, lon));
                (void)eng_.submit_attestation({tg.claim, tg.slot, OracleCoordinate{lat, lon, sig}});
            } else {
                std::int64_t m = rng_.range(p.measure_lo, p.measure_hi);
                Signature sig =
                    crypto::sign(*a.oracle_kp, sensor_message(tg.claim, tg.slot, m));
                (void)eng_.submit_attestation({tg.claim, tg.slot, OracleMeasurement{m, sig}});
            }
        }
    }

    void act_curator(AgentRt& a, const CuratorPolicy& p) {
        (void)eng_.claim_gov(a.account);

        std::vector<TokenId> touchable;
        for (const auto& [token, pr] : eng_.proceedings())
            if (!pr.poll && eng_.now() >= pr.deadline) touchable.push_back(token);
        for (TokenId token : touchable) (void)eng_.update_listing(token);

        std::vector<std::uint64_t> resolvable;
        for (const auto& [id, poll] : eng_.polls())
            if (!poll.outcome && eng_.now() >= poll.reveal_deadline) resolvable.push_back(id);
        for (std::uint64_t id : resolvable) (void)eng_.resolve_poll(id);

        for (auto it = a.pending_reveals.begin(); it != a.pending_reveals.end();) {
            const PollState* poll = eng_.find_poll(it->first);
            if (!poll || poll->outcome || eng_.now() >= poll->reveal_deadline) {
                it = a.pending_reveals.erase(it);  // window gone
                continue;
            }
            if (eng_.now() < poll->commit_deadline) {
                ++it;
                continue;
            }
            (void)eng_.reveal_vote(a.account, it->first, it->second.first, it->second.second);
            it = a.pending_reveals.erase(it);
        }

        if (p.vote_rule != VoteRule::Abstain) {
            std::vector<std::uint64_t> open_commits;
            for (const auto& [id, poll] : eng_.polls())
                if (!poll.outcome && eng_.now() < poll.commit_deadline &&
                    poll.commits.count(a.account) == 0)
                    open_commits.push_back(id);
            for (std::uint64_t id : open_commits) {
                Balance effective = eng_.effective_gov(a.account);
                if (effective == 0) continue;
                VoteChoice choice = p.vote_rule == VoteRule::Truthful ? VoteChoice::For
                                                                      : VoteChoice::Against;
                Balance stake = 1 + rng_.below(std::min<Balance>(4, effective));
                Hash32 salt = rng_.fill32();
                auto committed = eng_.commit_vote(a.account, id,
                                                  Engine::vote_commitment(choice, salt, id), stake);
                if (committed.ok()) a.pending_reveals[id] = {choice, salt};
            }
        }

        if (chance(rng_, p.apply_prob)) {
            std::vector<TokenId> unlisted;
            for (const auto& [id, t] : eng_.tokens()) {
                if (is_system_token(id)) continue;
                if (eng_.is_listed(id) || eng_.proceedings().count(id)) continue;
                unlisted.push_back(id);
            }
            if (!unlisted.empty()) {
                TokenId token = unlisted[rng_.below(unlisted.size())];
                (void)eng_.apply_listing(a.account, token, ListingKind::AddToList);
            }
        }

        if (chance(rng_, p.challenge_prob)) {
            std::vector<TokenId> challengeable;
            for (const auto& [token, pr] : eng_.proceedings())
                if (!pr.poll && eng_.now() < pr.deadline) challengeable.push_back(token);
            for (const auto& [token, owner] : eng_.registry())
                if (eng_.proceedings().count(token) == 0) challengeable.push_back(token);
            std::sort(challengeable.begin(), challengeable.end());
            if (!challengeable.empty()) {
                TokenId token = challengeable[rng_.below(challengeable.size())];
                (void)eng_.challenge(a.account, token);
            }
        }
    }

    const ScenarioConfig& cfg_;
    Engine eng_;
    SplitMix64 rng_;
    std::vector<AgentRt> agents_;
    std::vector<AccountId> curators_;
    std::map<std::uint64_t, std::size_t> claim_agent_;
    std::vector<std::size_t> policy_index_;
};

}  // namespace

Result<RunResult> run(const ScenarioConfig& config) {
    if (auto v = validate_scenario(config); !v.ok()) return v.error();
    auto eng = Engine::create(config.engine);
    if (!eng.ok()) return eng.error();
    Simulator s(config, std::move(eng).value());
    return s.play();
}

Result<std::vector<MetricsFrame>> replay(const std::vector<EventRecord>& records,
                                         std::uint64_t metrics_interval) {
    if (metrics_interval < 1) return {Errc::InvalidConfig, "metrics_interval"};
    if (records.empty()) return std::vector<MetricsFrame>{};
    Tick final_clock = records.back().time;
    std::vector<MetricsFrame> frames;
    auto eng = Engine::replay(records, [&](const Engine& e, const EventRecord& r) {
        if (!std::holds_alternative<TimeAdvanced>(r.event)) return;
        Tick now = e.now();
        if (now % metrics_interval == 0 || now == final_clock) frames.push_back(snapshot(e));
    });
    if (!eng.ok()) return eng.error();
    return frames;
}

// --- scenario files ---------------------------------------------------------

namespace {

struct ScenarioError {
    std::string path;
};

[[noreturn]] void bad(std::string path) { throw ScenarioError{std::move(path)}; }

const njson& member(const njson& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) bad(path + "." + key + ": missing");
    return *it;
}

std::uint64_t as_u64(const njson& j, const std::string& path) {
    if (!j.is_number_unsigned()) bad(path + ": unsigned integer expected");
    return j.get<std::uint64_t>();
}

std::int64_t as_i64(const njson& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path + ": integer expected");
    return j.get<std::int64_t>();
}

Rational as_rational(const njson& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) bad(path + ": [num, den] expected");
    return Rational{as_u64(j[0], path), as_u64(j[1], path)};
}

void as_i64_pair(const njson& j, const std::string& path, std::int64_t& lo, std::int64_t& hi) {
    if (!j.is_array() || j.size() != 2) bad(path + ": [lo, hi] expected");
    lo = as_i64(j[0], path);
    hi = as_i64(j[1], path);
}

TokenDesign design_at(const njson& j, const std::string& path) {
    if (!j.is_object()) bad(path + ": object expected");
    auto parsed = parse_token_design(j.dump());
    if (!parsed.ok()) bad(path + ": " + parsed.error().detail);
    return std::move(parsed).value();
}

AgentGroup agent_at(const njson& j, const std::string& path) {
    if (!j.is_object()) bad(path + ": object expected");
    AgentGroup grp;
    grp.count = j.contains("count") ? as_u64(j["count"], path + ".count") : 1;
    const njson& type = member(j, "type", path);
    if (!type.is_string()) bad(path + ".type: string expected");
    std::string kind = type.get<std::string>();
    if (kind == "HonestClaimant") {
        HonestClaimantPolicy p;
        p.action_prob = as_rational(member(j, "action_prob", path), path + ".action_prob");
        if (j.contains("target_tokens"))
            for (const auto& t : j["target_tokens"])
                p.target_tokens.push_back(as_u64(t, path + ".target_tokens"));
        grp.policy = std::move(p);
    } else if (kind == "FreeRider") {
        FreeRiderPolicy p;
        p.claim_prob = as_rational(member(j, "claim_prob", path), path + ".claim_prob");
        if (j.contains("bad_proof_strategy")) {
            std::string s = j["bad_proof_strategy"].is_string()
                                ? j["bad_proof_strategy"].get<std::string>()
                                : std::string{};
            if (s == "NoProof")
                p.bad_proof_strategy = BadProofStrategy::NoProof;
            else if (s == "ForgedSignature")
                p.bad_proof_strategy = BadProofStrategy::ForgedSignature;
            else if (s == "SelfApprove")
                p.bad_proof_strategy = BadProofStrategy::SelfApprove;
            else
                bad(path + ".bad_proof_strategy");
        }
        grp.policy = std::move(p);
    } else if (kind == "Creator") {
        CreatorPolicy p;
        p.create_tick = j.contains("create_tick") ? as_u64(j["create_tick"], path) : 0;
        if (j.contains("delegate_to_curators")) {
            if (!j["delegate_to_curators"].is_boolean()) bad(path + ".delegate_to_curators");
            p.delegate_to_curators = j["delegate_to_curators"].get<bool>();
        }
        const njson& designs = member(j, "designs", path);
        if (!designs.is_array()) bad(path + ".designs: array expected");
        for (std::size_t d = 0; d < designs.size(); ++d)
            p.designs_to_create.push_back(
                design_at(designs[d], path + ".designs[" + std::to_string(d) + "]"));
        grp.policy = std::move(p);
    } else if (kind == "Approver") {
        ApproverPolicy p;
        p.honesty_prob = as_rational(member(j, "honesty_prob", path), path + ".honesty_prob");
        grp.policy = std::move(p);
    } else if (kind == "Curator") {
        CuratorPolicy p;
        p.apply_prob = as_rational(member(j, "apply_prob", path), path + ".apply_prob");
        p.challenge_prob =
            as_rational(member(j, "challenge_prob", path), path + ".challenge_prob");
        if (j.contains("vote_rule")) {
            std::string s =
                j["vote_rule"].is_string() ? j["vote_rule"].get<std::string>() : std::string{};
            if (s == "truthful")
                p.vote_rule = VoteRule::Truthful;
            else if (s == "contrarian")
                p.vote_rule = VoteRule::Contrarian;
            else if (s == "abstain")
                p.vote_rule = VoteRule::Abstain;
            else
                bad(path + ".vote_rule");
        }
        grp.policy = std::move(p);
    } else if (kind == "Oracle") {
        OraclePolicy p;
        p.key_index = j.contains("key_index") ? as_u64(j["key_index"], path) : 0;
        if (j.contains("measurement_range"))
            as_i64_pair(j["measurement_range"], path + ".measurement_range", p.measure_lo,
                        p.measure_hi);
        if (j.contains("lat_range"))
            as_i64_pair(j["lat_range"], path + ".lat_range", p.lat_lo, p.lat_hi);
        if (j.contains("lon_range"))
            as_i64_pair(j["lon_range"], path + ".lon_range", p.lon_lo, p.lon_hi);
        grp.policy = std::move(p);
    } else {
        bad(path + ".type: unknown '" + kind + "'");
    }
    return grp;
}

ScenarioConfig scenario_from_json(const njson& j) {
    if (!j.is_object()) bad("scenario: object expected");
    ScenarioConfig cfg;
    if (j.contains("name")) {
        if (!j["name"].is_string()) bad("name: string expected");
        cfg.name = j["name"].get<std::string>();
    }
    cfg.seed = as_u64(member(j, "seed", "scenario"), "seed");
    cfg.steps = as_u64(member(j, "steps", "scenario"), "steps");
    cfg.metrics_interval =
        j.contains("metrics_interval") ? as_u64(j["metrics_interval"], "metrics_interval") : 1;
    if (j.contains("engine")) {
        auto parsed = parse_engine_config(j["engine"].dump());
        if (!parsed.ok()) bad("engine: " + parsed.error().detail);
        cfg.engine = std::move(parsed).value();
    }
    if (j.contains("setup_tokens")) {
        const njson& st = j["setup_tokens"];
        if (!st.is_array()) bad("setup_tokens: array expected");
        for (std::size_t i = 0; i < st.size(); ++i)
            cfg.setup_tokens.push_back(design_at(st[i], "setup_tokens[" + std::to_string(i) + "]"));
    }
    const njson& agents = member(j, "agents", "scenario");
    if (!agents.is_array()) bad("agents: array expected");
    for (std::size_t i = 0; i < agents.size(); ++i)
        cfg.agents.push_back(agent_at(agents[i], "agents[" + std::to_string(i) + "]"));
    return cfg;
}

}  // namespace

Result<ScenarioConfig> parse_scenario(std::string_view json_text) {
    njson j = njson::parse(json_text, nullptr, false);
    if (j.is_discarded()) return {Errc::InvalidConfig, "scenario: malformed JSON"};
    try {
        ScenarioConfig cfg = scenario_from_json(j);
        if (auto v = validate_scenario(cfg); !v.ok()) return v.error();
        return cfg;
    } catch (const ScenarioError& e) {
        return {Errc::InvalidConfig, e.path};
    }
}

Result<std::string> run_sweep(std::string_view base_scenario_json, std::string_view grid_json) {
    auto base = parse_scenario(base_scenario_json);
    if (!base.ok()) return base.error();

    njson grid = njson::parse(grid_json, nullptr, false);
    if (grid.is_discarded()) return {Errc::InvalidConfig, "grid: malformed JSON"};
    if (grid.is_object() && grid.contains("points")) grid = grid["points"];
    if (!grid.is_array() || grid.empty()) return {Errc::InvalidConfig, "grid: nonempty array expected"};

    njson base_doc = njson::parse(base_scenario_json, nullptr, false);
    std::string out =
        "grid_index,params,claims_submitted,claims_approved,claims_rejected,"
        "gov_supply,log_head_hash\n";
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const njson& point = grid[idx];
        if (!point.is_object())
            return {Errc::InvalidConfig, "grid[" + std::to_string(idx) + "]: object expected"};
        njson merged = base_doc;
        for (const auto& [key, value] : point.items()) merged[key] = value;
        auto cfg = parse_scenario(merged.dump());
        if (!cfg.ok())
            return {Errc::InvalidConfig,
                    "grid[" + std::to_string(idx) + "]: " + cfg.error().detail};
        ScenarioConfig scenario = std::move(cfg).value();
        scenario.seed = sweep_seed(base.value().seed, idx);
        auto rr = run(scenario);
        if (!rr.ok()) return rr.error();
        const MetricsFrame& last = rr.value().frames.back();
        std::string params = point.dump();
        std::string quoted = "\"";
        for (char ch : params) {
            quoted += ch;
            if (ch == '"') quoted += '"';
        }
        quoted += '"';
        out += std::to_string(idx) + "," + quoted + "," + std::to_string(last.claims_submitted) +
               "," + std::to_string(last.claims_approved) + "," +
               std::to_string(last.claims_rejected) + "," + std::to_string(last.gov_supply) + "," +
               to_hex(last.log_head_hash.data(), last.log_head_hash.size()) + "\n";
    }
    return out;
}

}  // namespace patlab::sim
