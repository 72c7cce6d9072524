#include "patlab/event_codec.hpp"

#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "patlab/crypto.hpp"

namespace patlab {

namespace {

using njson = nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// Canonical writer.
// ---------------------------------------------------------------------------

void esc(std::string& out, std::string_view s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

struct Obj {
    std::string& out;
    bool first = true;
    explicit Obj(std::string& o) : out(o) { out += '{'; }
    void key(std::string_view k) {
        if (!first) out += ',';
        first = false;
        esc(out, k);
        out += ':';
    }
    void u(std::string_view k, std::uint64_t v) {
        key(k);
        out += std::to_string(v);
    }
    void i(std::string_view k, std::int64_t v) {
        key(k);
        out += std::to_string(v);
    }
    void b(std::string_view k, bool v) {
        key(k);
        out += v ? "true" : "false";
    }
    void s(std::string_view k, std::string_view v) {
        key(k);
        esc(out, v);
    }
    void hx(std::string_view k, const std::uint8_t* p, std::size_t n) {
        key(k);
        out += '"';
        out += to_hex(p, n);
        out += '"';
    }
    void account(std::string_view k, const AccountId& a) { hx(k, a.bytes.data(), 32); }
    void close() { out += '}'; }
};

template <class T, class Fn>
void write_array(std::string& out, const std::vector<T>& xs, Fn&& one) {
    out += '[';
    bool first = true;
    for (const auto& x : xs) {
        if (!first) out += ',';
        first = false;
        one(out, x);
    }
    out += ']';
}

void write_verifier(std::string& out, const VerifierSpec& v) {
    std::visit(overloaded{
                   [&](const DesignatedApprover& x) {
                       Obj o(out);
                       o.s("type", "DesignatedApprover");
                       o.account("approver", x.approver);
                       o.close();
                   },
                   [&](const PeerQuorum& x) {
                       Obj o(out);
                       o.s("type", "PeerQuorum");
                       o.key("attestors");
                       write_array(out, x.attestors, [](std::string& w, const AccountId& a) {
                           w += '"';
                           w += a.hex();
                           w += '"';
                       });
                       o.u("quorum", x.quorum);
                       o.close();
                   },
                   [&](const SensorOracle& x) {
                       Obj o(out);
                       o.s("type", "SensorOracle");
                       o.hx("oracle_key", x.oracle_key.data(), 32);
                       o.s("comparator", comparator_name(x.comparator));
                       o.i("threshold", x.threshold);
                       o.close();
                   },
                   [&](const LocationVerifier& x) {
                       Obj o(out);
                       o.s("type", "Location");
                       o.i("center_lat_e7", x.center_lat_e7);
                       o.i("center_lon_e7", x.center_lon_e7);
                       o.u("radius_m", x.radius_m);
                       o.hx("oracle_key", x.oracle_key.data(), 32);
                       o.close();
                   },
                   [&](const TokenBalanceThreshold& x) {
                       Obj o(out);
                       o.s("type", "TokenBalanceThreshold");
                       o.u("token", x.token);
                       o.u("min_balance", x.min_balance);
                       o.close();
                   },
                   [&](const ClaimWindow& x) {
                       Obj o(out);
                       o.s("type", "ClaimWindow");
                       o.u("max_claims", x.max_claims);
                       o.u("per_ticks", x.per_ticks);
                       o.close();
                   },
                   [&](const AttachmentHash&) {
                       Obj o(out);
                       o.s("type", "AttachmentHash");
                       o.close();
                   },
               },
               v);
}

void write_backing(std::string& out, const BackingSpec& b) {
    std::visit(overloaded{
                   [&](const SwapPool& x) {
                       Obj o(out);
                       o.s("type", "SwapPool");
                       o.u("backing_token", x.backing_token);
                       o.close();
                   },
                   [&](const MintConversion& x) {
                       Obj o(out);
                       o.s("type", "MintConversion");
                       o.u("target_token", x.target_token);
                       o.u("rate_num", x.rate_num);
                       o.u("rate_den", x.rate_den);
                       o.close();
                   },
                   [&](const CoupledBurn& x) {
                       Obj o(out);
                       o.s("type", "CoupledBurn");
                       o.u("coupled_token", x.coupled_token);
                       o.close();
                   },
                   [&](const ExternalNote& x) {
                       Obj o(out);
                       o.s("type", "ExternalNote");
                       o.s("text", x.text);
                       o.close();
                   },
               },
               b);
}

void write_design(std::string& out, const TokenDesign& d) {
    Obj o(out);
    o.s("name", d.name);
    o.s("symbol", d.symbol);
    o.key("supply");
    std::visit(overloaded{
                   [&](const SupplyCapped& c) {
                       Obj s(out);
                       s.s("type", "Capped");
                       s.u("max", c.max);
                       s.close();
                   },
                   [&](const SupplyUncapped&) {
                       Obj s(out);
                       s.s("type", "Uncapped");
                       s.close();
                   },
               },
               d.supply);
    o.b("burnable", d.burnable);
    o.b("transferable", d.transferable);
    o.s("creation_condition", creation_condition_name(d.creation_condition));
    o.key("unconditional_creation");
    std::visit(overloaded{
                   [&](const PremintNone&) {
                       Obj s(out);
                       s.s("type", "None");
                       s.close();
                   },
                   [&](const PremintPartial& p) {
                       Obj s(out);
                       s.s("type", "Partial");
                       s.u("amount", p.amount);
                       s.account("to", p.to);
                       s.close();
                   },
                   [&](const PremintAll& p) {
                       Obj s(out);
                       s.s("type", "All");
                       s.u("amount", p.amount);
                       s.account("to", p.to);
                       s.close();
                   },
               },
               d.unconditional_creation);
    o.key("minting_policy");
    std::visit(overloaded{
                   [&](const FixedPerClaim& m) {
                       Obj s(out);
                       s.s("type", "FixedPerClaim");
                       s.u("units", m.units);
                       s.close();
                   },
                   [&](const ProportionalToQuantity& m) {
                       Obj s(out);
                       s.s("type", "ProportionalToQuantity");
                       s.u("unit_per_quantity", m.unit_per_quantity);
                       s.close();
                   },
               },
               d.minting_policy);
    o.key("verifiers");
    write_array(out, d.verifiers, write_verifier);
    o.key("sources_of_value");
    write_array(out, d.sources_of_value, write_backing);
    o.close();
}

void write_config(std::string& out, const EngineConfig& c) {
    Obj o(out);
    o.key("rep");
    {
        Obj r(out);
        r.u("rep_per_creation", c.rep.rep_per_creation);
        r.u("rep_per_claim", c.rep.rep_per_claim);
        r.u("gov_threshold", c.rep.gov_threshold);
        r.u("gov_per_level", c.rep.gov_per_level);
        r.close();
    }
    o.key("tcr");
    {
        Obj t(out);
        t.u("min_deposit", c.tcr.min_deposit);
        t.u("apply_stage_ticks", c.tcr.apply_stage_ticks);
        t.u("commit_stage_ticks", c.tcr.commit_stage_ticks);
        t.u("reveal_stage_ticks", c.tcr.reveal_stage_ticks);
        t.u("vote_quorum_pct", c.tcr.vote_quorum_pct);
        t.u("dispensation_pct", c.tcr.dispensation_pct);
        t.close();
    }
    o.b("gov_transferable", c.gov_transferable);
    o.s("coupled_burn_source", burn_source_name(c.coupled_burn_source));
    o.close();
}

void write_payload(std::string& out, const AttestationPayload& p) {
    std::visit(overloaded{
                   [&](const ApproverVerdict& x) {
                       Obj o(out);
                       o.s("type", "ApproverVerdict");
                       o.account("approver", x.approver);
                       o.b("approve", x.approve);
                       o.close();
                   },
                   [&](const PeerEndorsement& x) {
                       Obj o(out);
                       o.s("type", "PeerEndorsement");
                       o.account("attestor", x.attestor);
                       o.b("approve", x.approve);
                       o.close();
                   },
                   [&](const OracleMeasurement& x) {
                       Obj o(out);
                       o.s("type", "OracleMeasurement");
                       o.i("measurement", x.measurement);
                       o.hx("signature", x.signature.data(), 64);
                       o.close();
                   },
                   [&](const OracleCoordinate& x) {
                       Obj o(out);
                       o.s("type", "OracleCoordinate");
                       o.i("lat_e7", x.lat_e7);
                       o.i("lon_e7", x.lon_e7);
                       o.hx("signature", x.signature.data(), 64);
                       o.close();
                   },
                   [&](const ContentDigest& x) {
                       Obj o(out);
                       o.s("type", "ContentDigest");
                       o.hx("digest", x.digest.data(), 32);
                       o.close();
                   },
               },
               p);
}

void write_payouts(std::string& out, const std::vector<PayoutEntry>& xs) {
    write_array(out, xs, [](std::string& w, const PayoutEntry& e) {
        Obj o(w);
        o.account("account", e.account);
        o.u("amount", e.amount);
        o.close();
    });
}

void write_event(std::string& out, const Event& ev) {
    std::visit(
        overloaded{
            [&](const Genesis& x) {
                Obj o(out);
                o.s("type", "Genesis");
                o.key("config");
                write_config(out, x.config);
                o.close();
            },
            [&](const TimeAdvanced& x) {
                Obj o(out);
                o.s("type", "TimeAdvanced");
                o.u("ticks", x.ticks);
                o.close();
            },
            [&](const Transferred& x) {
                Obj o(out);
                o.s("type", "Transferred");
                o.u("token", x.token);
                o.account("from", x.from);
                o.account("to", x.to);
                o.u("amount", x.amount);
                o.close();
            },
            [&](const Burned& x) {
                Obj o(out);
                o.s("type", "Burned");
                o.u("token", x.token);
                o.account("from", x.from);
                o.u("amount", x.amount);
                o.close();
            },
            [&](const TokenCreated& x) {
                Obj o(out);
                o.s("type", "TokenCreated");
                o.u("token", x.token);
                o.account("creator", x.creator);
                o.key("design");
                write_design(out, x.design);
                o.close();
            },
            [&](const RepAwarded& x) {
                Obj o(out);
                o.s("type", "RepAwarded");
                o.account("account", x.account);
                o.u("amount", x.amount);
                o.s("reason", rep_reason_name(x.reason));
                o.close();
            },
            [&](const ClaimSubmitted& x) {
                Obj o(out);
                o.s("type", "ClaimSubmitted");
                o.u("claim", x.claim);
                o.u("token", x.token);
                o.account("claimant", x.claimant);
                o.u("quantity", x.quantity);
                o.close();
            },
            [&](const ProofRecorded& x) {
                Obj o(out);
                o.s("type", "ProofRecorded");
                o.u("claim", x.claim);
                o.u("slot", x.slot);
                o.key("payload");
                write_payload(out, x.payload);
                o.close();
            },
            [&](const SlotDecided& x) {
                Obj o(out);
                o.s("type", "SlotDecided");
                o.u("claim", x.claim);
                o.u("slot", x.slot);
                o.b("approved", x.approved);
                if (x.code) {
                    o.s("code", reject_code_name(*x.code));
                } else {
                    o.key("code");
                    out += "null";
                }
                o.close();
            },
            [&](const ClaimFinalized& x) {
                Obj o(out);
                o.s("type", "ClaimFinalized");
                o.u("claim", x.claim);
                o.u("minted", x.minted);
                o.close();
            },
            [&](const ClaimMintDeferred& x) {
                Obj o(out);
                o.s("type", "ClaimMintDeferred");
                o.u("claim", x.claim);
                o.u("requested", x.requested);
                o.close();
            },
            [&](const ListingApplied& x) {
                Obj o(out);
                o.s("type", "ListingApplied");
                o.u("token", x.token);
                o.s("kind", listing_kind_name(x.kind));
                o.account("applicant", x.applicant);
                o.u("deposit", x.deposit);
                o.u("deadline", x.deadline);
                o.close();
            },
            [&](const ChallengeOpened& x) {
                Obj o(out);
                o.s("type", "ChallengeOpened");
                o.u("token", x.token);
                o.account("challenger", x.challenger);
                o.u("deposit", x.deposit);
                o.u("poll", x.poll);
                o.u("commit_deadline", x.commit_deadline);
                o.u("reveal_deadline", x.reveal_deadline);
                o.close();
            },
            [&](const ListingFinalized& x) {
                Obj o(out);
                o.s("type", "ListingFinalized");
                o.u("token", x.token);
                o.b("listed", x.listed);
                o.close();
            },
            [&](const VoteCommitted& x) {
                Obj o(out);
                o.s("type", "VoteCommitted");
                o.u("poll", x.poll);
                o.account("voter", x.voter);
                o.hx("commit_hash", x.commit_hash.data(), 32);
                o.u("stake", x.stake);
                o.close();
            },
            [&](const VoteRevealed& x) {
                Obj o(out);
                o.s("type", "VoteRevealed");
                o.u("poll", x.poll);
                o.account("voter", x.voter);
                o.s("choice", vote_choice_name(x.choice));
                o.hx("salt", x.salt.data(), 32);
                o.close();
            },
            [&](const PollResolved& x) {
                Obj o(out);
                o.s("type", "PollResolved");
                o.u("poll", x.poll);
                o.s("outcome", poll_outcome_name(x.outcome));
                o.u("party_cut", x.party_cut);
                o.key("voter_rewards");
                write_payouts(out, x.voter_rewards);
                o.key("seized_delegations");
                write_payouts(out, x.seized_delegations);
                o.close();
            },
            [&](const GovClaimed& x) {
                Obj o(out);
                o.s("type", "GovClaimed");
                o.account("account", x.account);
                o.u("amount", x.amount);
                o.close();
            },
            [&](const GovDelegated& x) {
                Obj o(out);
                o.s("type", "GovDelegated");
                o.account("from", x.from);
                o.account("to", x.to);
                o.u("amount", x.amount);
                o.close();
            },
            [&](const DelegationRevoked& x) {
                Obj o(out);
                o.s("type", "DelegationRevoked");
                o.account("from", x.from);
                o.account("to", x.to);
                o.u("amount", x.amount);
                o.close();
            },
            [&](const PoolDeposited& x) {
                Obj o(out);
                o.s("type", "PoolDeposited");
                o.u("token", x.token);
                o.account("depositor", x.depositor);
                o.u("amount", x.amount);
                o.close();
            },
            [&](const SwapRedeemed& x) {
                Obj o(out);
                o.s("type", "SwapRedeemed");
                o.u("token", x.token);
                o.account("redeemer", x.redeemer);
                o.u("units", x.units);
                o.u("payout", x.payout);
                o.close();
            },
            [&](const MintConverted& x) {
                Obj o(out);
                o.s("type", "MintConverted");
                o.u("token", x.token);
                o.account("account", x.account);
                o.u("burned", x.burned);
                o.u("minted", x.minted);
                o.close();
            },
            [&](const CoupledBurned& x) {
                Obj o(out);
                o.s("type", "CoupledBurned");
                o.u("token", x.token);
                o.account("account", x.account);
                o.u("amount", x.amount);
                o.close();
            },
        },
        ev);
}

// ---------------------------------------------------------------------------
// Parser. Throws ParseFail internally; public entry points catch.
// ---------------------------------------------------------------------------

struct ParseFail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(const std::string& m) { throw ParseFail(m); }

const njson& need(const njson& j, const char* k) {
    if (!j.is_object()) fail("expected object");
    auto it = j.find(k);
    if (it == j.end()) fail(std::string("missing field ") + k);
    return *it;
}

std::uint64_t get_u64(const njson& j, const char* k) {
    const njson& v = need(j, k);
    if (!v.is_number_unsigned()) fail(std::string(k) + ": not an unsigned integer");
    return v.get<std::uint64_t>();
}

std::int64_t get_i64(const njson& j, const char* k) {
    const njson& v = need(j, k);
    if (v.is_number_unsigned()) {
        auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            fail(std::string(k) + ": out of range");
        return static_cast<std::int64_t>(u);
    }
    if (!v.is_number_integer()) fail(std::string(k) + ": not an integer");
    return v.get<std::int64_t>();
}

bool get_bool(const njson& j, const char* k) {
    const njson& v = need(j, k);
    if (!v.is_boolean()) fail(std::string(k) + ": not a boolean");
    return v.get<bool>();
}

std::string get_str(const njson& j, const char* k) {
    const njson& v = need(j, k);
    if (!v.is_string()) fail(std::string(k) + ": not a string");
    return v.get<std::string>();
}

template <std::size_t N>
std::array<std::uint8_t, N> get_hex_arr(const njson& j, const char* k) {
    auto s = get_str(j, k);
    auto a = array_from_hex<N>(s);
    if (!a) fail(std::string(k) + ": not " + std::to_string(2 * N) + " lowercase hex chars");
    return *a;
}

AccountId get_account(const njson& j, const char* k) { return AccountId{get_hex_arr<32>(j, k)}; }

const njson& get_arr(const njson& j, const char* k) {
    const njson& v = need(j, k);
    if (!v.is_array()) fail(std::string(k) + ": not an array");
    return v;
}

std::string get_type(const njson& j) { return get_str(j, "type"); }

RepReason parse_rep_reason(const std::string& s) {
    if (s == "TokenCreated") return RepReason::TokenCreated;
    if (s == "ClaimApproved") return RepReason::ClaimApproved;
    fail("unknown rep reason " + s);
}

RejectCode parse_reject_code(const std::string& s) {
    if (s == "WindowExceeded") return RejectCode::WindowExceeded;
    if (s == "BalanceBelowThreshold") return RejectCode::BalanceBelowThreshold;
    if (s == "ApproverRejected") return RejectCode::ApproverRejected;
    if (s == "QuorumImpossible") return RejectCode::QuorumImpossible;
    if (s == "MeasurementOutOfRange") return RejectCode::MeasurementOutOfRange;
    if (s == "OutsideRadius") return RejectCode::OutsideRadius;
    fail("unknown reject code " + s);
}

ListingKind parse_listing_kind(const std::string& s) {
    if (s == "AddToList") return ListingKind::AddToList;
    if (s == "RemoveFromList") return ListingKind::RemoveFromList;
    fail("unknown listing kind " + s);
}

VoteChoice parse_vote_choice(const std::string& s) {
    if (s == "For") return VoteChoice::For;
    if (s == "Against") return VoteChoice::Against;
    fail("unknown vote choice " + s);
}

PollOutcome parse_poll_outcome(const std::string& s) {
    if (s == "ListingWins") return PollOutcome::ListingWins;
    if (s == "ChallengerWins") return PollOutcome::ChallengerWins;
    fail("unknown poll outcome " + s);
}

Comparator parse_comparator(const std::string& s) {
    if (s == "GreaterEqual") return Comparator::GreaterEqual;
    if (s == "LessEqual") return Comparator::LessEqual;
    fail("unknown comparator " + s);
}

CreationCondition parse_creation_condition(const std::string& s) {
    if (s == "Action") return CreationCondition::Action;
    if (s == "Consensus") return CreationCondition::Consensus;
    if (s == "Both") return CreationCondition::Both;
    fail("unknown creation condition " + s);
}

BurnSource parse_burn_source(const std::string& s) {
    if (s == "Custody") return BurnSource::Custody;
    if (s == "Holder") return BurnSource::Holder;
    fail("unknown burn source " + s);
}

VerifierSpec parse_verifier(const njson& j) {
    auto t = get_type(j);
    if (t == "DesignatedApprover") return DesignatedApprover{get_account(j, "approver")};
    if (t == "PeerQuorum") {
        PeerQuorum q;
        for (const auto& a : get_arr(j, "attestors")) {
            if (!a.is_string()) fail("attestors: not hex strings");
            auto acct = AccountId::from_hex(a.get<std::string>());
            if (!acct) fail("attestors: bad account hex");
            q.attestors.push_back(*acct);
        }
        q.quorum = get_u64(j, "quorum");
        return q;
    }
    if (t == "SensorOracle") {
        SensorOracle s;
        s.oracle_key = get_hex_arr<32>(j, "oracle_key");
        s.comparator = parse_comparator(get_str(j, "comparator"));
        s.threshold = get_i64(j, "threshold");
        return s;
    }
    if (t == "Location") {
        LocationVerifier l;
        l.center_lat_e7 = get_i64(j, "center_lat_e7");
        l.center_lon_e7 = get_i64(j, "center_lon_e7");
        l.radius_m = get_u64(j, "radius_m");
        l.oracle_key = get_hex_arr<32>(j, "oracle_key");
        return l;
    }
    if (t == "TokenBalanceThreshold")
        return TokenBalanceThreshold{get_u64(j, "token"), get_u64(j, "min_balance")};
    if (t == "ClaimWindow") return ClaimWindow{get_u64(j, "max_claims"), get_u64(j, "per_ticks")};
    if (t == "AttachmentHash") return AttachmentHash{};
    fail("unknown verifier type " + t);
}

BackingSpec parse_backing(const njson& j) {
    auto t = get_type(j);
    if (t == "SwapPool") return SwapPool{get_u64(j, "backing_token")};
    if (t == "MintConversion")
        return MintConversion{get_u64(j, "target_token"), get_u64(j, "rate_num"),
                              get_u64(j, "rate_den")};
    if (t == "CoupledBurn") return CoupledBurn{get_u64(j, "coupled_token")};
    if (t == "ExternalNote") return ExternalNote{get_str(j, "text")};
    fail("unknown backing type " + t);
}

TokenDesign parse_design(const njson& j) {
    TokenDesign d;
    d.name = get_str(j, "name");
    d.symbol = get_str(j, "symbol");
    {
        const njson& s = need(j, "supply");
        auto t = get_type(s);
        if (t == "Capped")
            d.supply = SupplyCapped{get_u64(s, "max")};
        else if (t == "Uncapped")
            d.supply = SupplyUncapped{};
        else
            fail("unknown supply type " + t);
    }
    d.burnable = get_bool(j, "burnable");
    d.transferable = get_bool(j, "transferable");
    d.creation_condition = parse_creation_condition(get_str(j, "creation_condition"));
    {
        const njson& u = need(j, "unconditional_creation");
        auto t = get_type(u);
        if (t == "None")
            d.unconditional_creation = PremintNone{};
        else if (t == "Partial")
            d.unconditional_creation = PremintPartial{get_u64(u, "amount"), get_account(u, "to")};
        else if (t == "All")
            d.unconditional_creation = PremintAll{get_u64(u, "amount"), get_account(u, "to")};
        else
            fail("unknown unconditional_creation type " + t);
    }
    {
        const njson& m = need(j, "minting_policy");
        auto t = get_type(m);
        if (t == "FixedPerClaim")
            d.minting_policy = FixedPerClaim{get_u64(m, "units")};
        else if (t == "ProportionalToQuantity")
            d.minting_policy = ProportionalToQuantity{get_u64(m, "unit_per_quantity")};
        else
            fail("unknown minting_policy type " + t);
    }
    for (const auto& v : get_arr(j, "verifiers")) d.verifiers.push_back(parse_verifier(v));
    for (const auto& s : get_arr(j, "sources_of_value"))
        d.sources_of_value.push_back(parse_backing(s));
    return d;
}

EngineConfig parse_config(const njson& j) {
    EngineConfig c;
    const njson& r = need(j, "rep");
    c.rep.rep_per_creation = get_u64(r, "rep_per_creation");
    c.rep.rep_per_claim = get_u64(r, "rep_per_claim");
    c.rep.gov_threshold = get_u64(r, "gov_threshold");
    c.rep.gov_per_level = get_u64(r, "gov_per_level");
    const njson& t = need(j, "tcr");
    c.tcr.min_deposit = get_u64(t, "min_deposit");
    c.tcr.apply_stage_ticks = get_u64(t, "apply_stage_ticks");
    c.tcr.commit_stage_ticks = get_u64(t, "commit_stage_ticks");
    c.tcr.reveal_stage_ticks = get_u64(t, "reveal_stage_ticks");
    auto quorum = get_u64(t, "vote_quorum_pct");
    auto disp = get_u64(t, "dispensation_pct");
    if (quorum > 100 || disp > 100) fail("percentage above 100");
    c.tcr.vote_quorum_pct = static_cast<std::uint32_t>(quorum);
    c.tcr.dispensation_pct = static_cast<std::uint32_t>(disp);
    c.gov_transferable = get_bool(j, "gov_transferable");
    c.coupled_burn_source = parse_burn_source(get_str(j, "coupled_burn_source"));
    return c;
}

AttestationPayload parse_payload(const njson& j) {
    auto t = get_type(j);
    if (t == "ApproverVerdict")
        return ApproverVerdict{get_account(j, "approver"), get_bool(j, "approve")};
    if (t == "PeerEndorsement")
        return PeerEndorsement{get_account(j, "attestor"), get_bool(j, "approve")};
    if (t == "OracleMeasurement")
        return OracleMeasurement{get_i64(j, "measurement"), get_hex_arr<64>(j, "signature")};
    if (t == "OracleCoordinate")
        return OracleCoordinate{get_i64(j, "lat_e7"), get_i64(j, "lon_e7"),
                                get_hex_arr<64>(j, "signature")};
    if (t == "ContentDigest") return ContentDigest{get_hex_arr<32>(j, "digest")};
    fail("unknown payload type " + t);
}

std::vector<PayoutEntry> parse_payouts(const njson& j, const char* k) {
    std::vector<PayoutEntry> out;
    for (const auto& e : get_arr(j, k))
        out.push_back(PayoutEntry{get_account(e, "account"), get_u64(e, "amount")});
    return out;
}

Event parse_event(const njson& j) {
    auto t = get_type(j);
    if (t == "Genesis") return Genesis{parse_config(need(j, "config"))};
    if (t == "TimeAdvanced") return TimeAdvanced{get_u64(j, "ticks")};
    if (t == "Transferred")
        return Transferred{get_u64(j, "token"), get_account(j, "from"), get_account(j, "to"),
                           get_u64(j, "amount")};
    if (t == "Burned")
        return Burned{get_u64(j, "token"), get_account(j, "from"), get_u64(j, "amount")};
    if (t == "TokenCreated")
        return TokenCreated{get_u64(j, "token"), get_account(j, "creator"),
                            parse_design(need(j, "design"))};
    if (t == "RepAwarded")
        return RepAwarded{get_account(j, "account"), get_u64(j, "amount"),
                          parse_rep_reason(get_str(j, "reason"))};
    if (t == "ClaimSubmitted")
        return ClaimSubmitted{get_u64(j, "claim"), get_u64(j, "token"), get_account(j, "claimant"),
                              get_u64(j, "quantity")};
    if (t == "ProofRecorded")
        return ProofRecorded{get_u64(j, "claim"), get_u64(j, "slot"),
                             parse_payload(need(j, "payload"))};
    if (t == "SlotDecided") {
        SlotDecided s;
        s.claim = get_u64(j, "claim");
        s.slot = get_u64(j, "slot");
        s.approved = get_bool(j, "approved");
        const njson& c = need(j, "code");
        if (c.is_null())
            s.code = std::nullopt;
        else if (c.is_string())
            s.code = parse_reject_code(c.get<std::string>());
        else
            fail("code: not a string or null");
        return s;
    }
    if (t == "ClaimFinalized") return ClaimFinalized{get_u64(j, "claim"), get_u64(j, "minted")};
    if (t == "ClaimMintDeferred")
        return ClaimMintDeferred{get_u64(j, "claim"), get_u64(j, "requested")};
    if (t == "ListingApplied")
        return ListingApplied{get_u64(j, "token"), parse_listing_kind(get_str(j, "kind")),
                              get_account(j, "applicant"), get_u64(j, "deposit"),
                              get_u64(j, "deadline")};
    if (t == "ChallengeOpened")
        return ChallengeOpened{get_u64(j, "token"),           get_account(j, "challenger"),
                               get_u64(j, "deposit"),         get_u64(j, "poll"),
                               get_u64(j, "commit_deadline"), get_u64(j, "reveal_deadline")};
    if (t == "ListingFinalized")
        return ListingFinalized{get_u64(j, "token"), get_bool(j, "listed")};
    if (t == "VoteCommitted")
        return VoteCommitted{get_u64(j, "poll"), get_account(j, "voter"),
                             get_hex_arr<32>(j, "commit_hash"), get_u64(j, "stake")};
    if (t == "VoteRevealed")
        return VoteRevealed{get_u64(j, "poll"), get_account(j, "voter"),
                            parse_vote_choice(get_str(j, "choice")), get_hex_arr<32>(j, "salt")};
    if (t == "PollResolved")
        return PollResolved{get_u64(j, "poll"), parse_poll_outcome(get_str(j, "outcome")),
                            get_u64(j, "party_cut"), parse_payouts(j, "voter_rewards"),
                            parse_payouts(j, "seized_delegations")};
    if (t == "GovClaimed") return GovClaimed{get_account(j, "account"), get_u64(j, "amount")};
    if (t == "GovDelegated")
        return GovDelegated{get_account(j, "from"), get_account(j, "to"), get_u64(j, "amount")};
    if (t == "DelegationRevoked")
        return DelegationRevoked{get_account(j, "from"), get_account(j, "to"),
                                 get_u64(j, "amount")};
    if (t == "PoolDeposited")
        return PoolDeposited{get_u64(j, "token"), get_account(j, "depositor"),
                             get_u64(j, "amount")};
    if (t == "SwapRedeemed")
        return SwapRedeemed{get_u64(j, "token"), get_account(j, "redeemer"), get_u64(j, "units"),
                            get_u64(j, "payout")};
    if (t == "MintConverted")
        return MintConverted{get_u64(j, "token"), get_account(j, "account"), get_u64(j, "burned"),
                             get_u64(j, "minted")};
    if (t == "CoupledBurned")
        return CoupledBurned{get_u64(j, "token"), get_account(j, "account"),
                             get_u64(j, "amount")};
    fail("unknown event type " + t);
}

njson parse_json_text(std::string_view text) {
    return njson::parse(text);  // throws nlohmann exceptions on bad input
}

struct ChainWalk {
    Hash32 prev{};
    Tick clock = 0;
    std::uint64_t idx = 0;

    // Empty string means the record checks out; otherwise the reason.
    std::string step(const EventRecord& r) {
        if (r.seq != idx) return "seq discontinuity";
        bool genesis = std::holds_alternative<Genesis>(r.event);
        if (idx == 0 && !genesis) return "first record not genesis";
        if (idx != 0 && genesis) return "genesis after start";
        if (r.prev_hash != prev) return "hash chain break";
        std::string ej;
        write_event(ej, r.event);
        if (record_hash(r.prev_hash, ej, r.seq) != r.hash) return "hash mismatch";
        if (const auto* t = std::get_if<TimeAdvanced>(&r.event)) {
            auto next = checked_add(clock, t->ticks);
            if (!next) return "clock overflow";
            clock = *next;
        }
        if (r.time != clock) return "time inconsistent";
        prev = r.hash;
        ++idx;
        return {};
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points.
// ---------------------------------------------------------------------------

std::string canonical_json(const Event& event) {
    std::string out;
    write_event(out, event);
    return out;
}

std::string canonical_json(const TokenDesign& design) {
    std::string out;
    write_design(out, design);
    return out;
}

std::string canonical_json(const EngineConfig& config) {
    std::string out;
    write_config(out, config);
    return out;
}

std::string canonical_json(const Attestation& att) {
    std::string out;
    Obj o(out);
    o.u("claim", att.claim);
    o.u("slot", att.slot);
    o.key("payload");
    write_payload(out, att.payload);
    o.close();
    return out;
}

Hash32 record_hash(const Hash32& prev_hash, std::string_view event_json, std::uint64_t seq) {
    std::string msg;
    msg.reserve(64 + event_json.size() + 20);
    msg += to_hex(prev_hash);
    msg += event_json;
    msg += std::to_string(seq);
    return crypto::sha256(msg);
}

std::string record_line(const EventRecord& record) {
    std::string out;
    out += "{\"seq\":";
    out += std::to_string(record.seq);
    out += ",\"prev_hash\":\"";
    out += to_hex(record.prev_hash);
    out += "\",\"time\":";
    out += std::to_string(record.time);
    out += ",\"event\":";
    write_event(out, record.event);
    out += ",\"hash\":\"";
    out += to_hex(record.hash);
    out += "\"}";
    return out;
}

Result<EventRecord> parse_record_line(std::string_view line) {
    try {
        njson j = parse_json_text(line);
        if (!j.is_object()) fail("record not an object");
        EventRecord r;
        r.seq = get_u64(j, "seq");
        r.prev_hash = get_hex_arr<32>(j, "prev_hash");
        r.time = get_u64(j, "time");
        r.event = parse_event(need(j, "event"));
        r.hash = get_hex_arr<32>(j, "hash");
        return r;
    } catch (const ParseFail& e) {
        return {Errc::CorruptLog, e.what()};
    } catch (const njson::exception& e) {
        return {Errc::CorruptLog, e.what()};
    }
}

Result<TokenDesign> parse_token_design(std::string_view json_text) {
    try {
        return parse_design(parse_json_text(json_text));
    } catch (const ParseFail& e) {
        return {Errc::InvalidDesign, e.what()};
    } catch (const njson::exception& e) {
        return {Errc::InvalidDesign, e.what()};
    }
}

Result<EngineConfig> parse_engine_config(std::string_view json_text) {
    try {
        return parse_config(parse_json_text(json_text));
    } catch (const ParseFail& e) {
        return {Errc::InvalidConfig, e.what()};
    } catch (const njson::exception& e) {
        return {Errc::InvalidConfig, e.what()};
    }
}

Result<Attestation> parse_attestation(std::string_view json_text) {
    try {
        njson j = parse_json_text(json_text);
        Attestation a;
        a.claim = get_u64(j, "claim");
        a.slot = get_u64(j, "slot");
        a.payload = parse_payload(need(j, "payload"));
        return a;
    } catch (const ParseFail& e) {
        return {Errc::PayloadMismatch, e.what()};
    } catch (const njson::exception& e) {
        return {Errc::PayloadMismatch, e.what()};
    }
}

LogVerifyResult verify_records(const std::vector<EventRecord>& records) {
    ChainWalk walk;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (auto why = walk.step(records[i]); !why.empty())
            return {false, static_cast<std::uint64_t>(i), why};
    }
    return {};
}

LogVerifyResult verify_log_text(std::string_view text) {
    ChainWalk walk;
    std::uint64_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        auto rec = parse_record_line(line);
        if (!rec.ok()) return {false, line_no, "parse: " + rec.error().detail};
        if (record_line(rec.value()) != line) return {false, line_no, "non-canonical record"};
        if (auto why = walk.step(rec.value()); !why.empty()) return {false, line_no, why};
        ++line_no;
    }
    return {};
}

Result<std::vector<EventRecord>> parse_log_text(std::string_view text) {
    std::vector<EventRecord> out;
    std::uint64_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        auto rec = parse_record_line(line);
        if (!rec.ok())
            return Error{Errc::CorruptLog,
                         "line " + std::to_string(line_no) + ": " + rec.error().detail};
        out.push_back(std::move(rec.value()));
        ++line_no;
    }
    return out;
}

std::string render_log_text(const std::vector<EventRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_line(r);
        out += '\n';
    }
    return out;
}

std::string_view rep_reason_name(RepReason r) {
    return r == RepReason::TokenCreated ? "TokenCreated" : "ClaimApproved";
}

std::string_view reject_code_name(RejectCode c) {
    switch (c) {
        case RejectCode::WindowExceeded: return "WindowExceeded";
        case RejectCode::BalanceBelowThreshold: return "BalanceBelowThreshold";
        case RejectCode::ApproverRejected: return "ApproverRejected";
        case RejectCode::QuorumImpossible: return "QuorumImpossible";
        case RejectCode::MeasurementOutOfRange: return "MeasurementOutOfRange";
        case RejectCode::OutsideRadius: return "OutsideRadius";
    }
    return "Unknown";
}

std::string_view listing_kind_name(ListingKind k) {
    return k == ListingKind::AddToList ? "AddToList" : "RemoveFromList";
}

std::string_view vote_choice_name(VoteChoice c) {
    return c == VoteChoice::For ? "For" : "Against";
}

std::string_view poll_outcome_name(PollOutcome o) {
    return o == PollOutcome::ListingWins ? "ListingWins" : "ChallengerWins";
}

std::string_view burn_source_name(BurnSource s) {
    return s == BurnSource::Custody ? "Custody" : "Holder";
}

std::string_view errc_name(Errc c) {
    switch (c) {
        case Errc::UnknownToken: return "UnknownToken";
        case Errc::NonTransferable: return "NonTransferable";
        case Errc::NotBurnable: return "NotBurnable";
        case Errc::InsufficientBalance: return "InsufficientBalance";
        case Errc::SupplyCapExceeded: return "SupplyCapExceeded";
        case Errc::ZeroTicks: return "ZeroTicks";
        case Errc::Overflow: return "Overflow";
        case Errc::InvalidDesign: return "InvalidDesign";
        case Errc::TokenNotClaimable: return "TokenNotClaimable";
        case Errc::UnknownClaim: return "UnknownClaim";
        case Errc::ClaimClosed: return "ClaimClosed";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::PayloadMismatch: return "PayloadMismatch";
        case Errc::BadOracleSignature: return "BadOracleSignature";
        case Errc::UnauthorizedAttestor: return "UnauthorizedAttestor";
        case Errc::DuplicateAttestation: return "DuplicateAttestation";
        case Errc::NotAllApproved: return "NotAllApproved";
        case Errc::InsufficientGov: return "InsufficientGov";
        case Errc::ListingExists: return "ListingExists";
        case Errc::WrongKind: return "WrongKind";
        case Errc::NoActiveListing: return "NoActiveListing";
        case Errc::AlreadyChallenged: return "AlreadyChallenged";
        case Errc::DeadlineNotReached: return "DeadlineNotReached";
        case Errc::CommitClosed: return "CommitClosed";
        case Errc::DuplicateCommit: return "DuplicateCommit";
        case Errc::ZeroStake: return "ZeroStake";
        case Errc::RevealClosed: return "RevealClosed";
        case Errc::RevealTooEarly: return "RevealTooEarly";
        case Errc::HashMismatch: return "HashMismatch";
        case Errc::NoCommit: return "NoCommit";
        case Errc::DuplicateReveal: return "DuplicateReveal";
        case Errc::PollNotEnded: return "PollNotEnded";
        case Errc::AlreadyResolved: return "AlreadyResolved";
        case Errc::UnknownPoll: return "UnknownPoll";
        case Errc::NoSuchDelegation: return "NoSuchDelegation";
        case Errc::DelegationLocked: return "DelegationLocked";
        case Errc::NoSwapPool: return "NoSwapPool";
        case Errc::EmptyPool: return "EmptyPool";
        case Errc::NoMintConversion: return "NoMintConversion";
        case Errc::NoCoupledBurn: return "NoCoupledBurn";
        case Errc::InsufficientCoupledBalance: return "InsufficientCoupledBalance";
        case Errc::CorruptLog: return "CorruptLog";
        case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace patlab
