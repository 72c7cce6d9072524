#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "patlab/crypto.hpp"
#include "patlab/engine.hpp"

namespace patlab {

std::string_view slot_status_name(SlotStatus s) {
    switch (s) {
        case SlotStatus::Pending: return "Pending";
        case SlotStatus::Approved: return "Approved";
        case SlotStatus::Rejected: return "Rejected";
    }
    return "?";
}

std::string_view claim_status_name(ClaimStatus s) {
    switch (s) {
        case ClaimStatus::Open: return "Open";
        case ClaimStatus::Approved: return "Approved";
        case ClaimStatus::Rejected: return "Rejected";
    }
    return "?";
}

std::string sensor_message(std::uint64_t claim, std::uint64_t slot, std::int64_t measurement) {
    return "sensor:" + std::to_string(claim) + ":" + std::to_string(slot) + ":" +
           std::to_string(measurement);
}

std::string location_message(std::uint64_t claim, std::uint64_t slot, std::int64_t lat_e7,
                             std::int64_t lon_e7) {
    return "location:" + std::to_string(claim) + ":" + std::to_string(slot) + ":" +
           std::to_string(lat_e7) + ":" + std::to_string(lon_e7);
}

namespace {

Error corrupt(std::string detail) { return Error{Errc::CorruptLog, std::move(detail)}; }

// Haversine distance on a 6371 km sphere, coordinates in 1e-7 degree ticks.
bool inside_radius(const LocationVerifier& v, std::int64_t lat_e7, std::int64_t lon_e7) {
    constexpr double kEarthRadiusM = 6371000.0;
    auto to_rad = [](std::int64_t e7) {
        return static_cast<double>(e7) * 1e-7 * (std::numbers::pi / 180.0);
    };
    double phi1 = to_rad(v.center_lat_e7);
    double phi2 = to_rad(lat_e7);
    double s1 = std::sin(to_rad(lat_e7 - v.center_lat_e7) / 2.0);
    double s2 = std::sin(to_rad(lon_e7 - v.center_lon_e7) / 2.0);
    double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    a = std::clamp(a, 0.0, 1.0);
    double distance = 2.0 * kEarthRadiusM * std::asin(std::sqrt(a));
    return distance <= static_cast<double>(v.radius_m);
}

// Payload variants pair with spec variants one-to-one; automatic slots
// (balance threshold, claim window) accept no payload at all.
bool payload_matches(const AttestationPayload& p, const VerifierSpec& spec) {
    switch (p.index()) {
        case 0: return std::holds_alternative<DesignatedApprover>(spec);
        case 1: return std::holds_alternative<PeerQuorum>(spec);
        case 2: return std::holds_alternative<SensorOracle>(spec);
        case 3: return std::holds_alternative<LocationVerifier>(spec);
        case 4: return std::holds_alternative<AttachmentHash>(spec);
    }
    return false;
}

}  // namespace

// --- submission ------------------------------------------------------------

Result<std::uint64_t> Engine::submit_claim(const AccountId& claimant, TokenId token,
                                           Balance quantity) {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    if (is_system_token(token)) return {Errc::TokenNotClaimable, "system token"};
    const TokenDesign& d = it->second.record.design;
    if (std::holds_alternative<PremintAll>(d.unconditional_creation))
        return {Errc::TokenNotClaimable, "supply fully preminted"};
    Balance q = quantity;
    if (std::holds_alternative<FixedPerClaim>(d.minting_policy)) {
        q = 1;
    } else if (const auto* p = std::get_if<ProportionalToQuantity>(&d.minting_policy)) {
        if (!checked_mul(p->unit_per_quantity, q)) return {Errc::Overflow, "quantity"};
    }

    std::uint64_t id = next_claim_id_;
    emit(ClaimSubmitted{id, token, claimant, q});

    for (std::size_t i = 0; i < d.verifiers.size(); ++i) {
        if (claims_.at(id).status != ClaimStatus::Open) break;
        SlotDecision dec;
        if (const auto* w = std::get_if<ClaimWindow>(&d.verifiers[i]))
            dec = eval_window(*w, claimant, token, id);
        else if (const auto* tb = std::get_if<TokenBalanceThreshold>(&d.verifiers[i]))
            dec = eval_balance(*tb, claimant);
        else
            continue;
        emit(SlotDecided{id, i, dec.approved, dec.code});
    }
    try_finalize(id);
    return id;
}

Result<void> Engine::apply(const ClaimSubmitted& e) {
    if (e.claim != next_claim_id_) return corrupt("claim id out of sequence");
    auto it = tokens_.find(e.token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(e.token)};
    if (is_system_token(e.token)) return {Errc::TokenNotClaimable, "system token"};
    const TokenDesign& d = it->second.record.design;
    if (std::holds_alternative<PremintAll>(d.unconditional_creation))
        return {Errc::TokenNotClaimable, "supply fully preminted"};
    if (std::holds_alternative<FixedPerClaim>(d.minting_policy)) {
        if (e.quantity != 1) return corrupt("fixed-policy claim must carry quantity 1");
    } else if (const auto* p = std::get_if<ProportionalToQuantity>(&d.minting_policy)) {
        if (!checked_mul(p->unit_per_quantity, e.quantity)) return {Errc::Overflow, "quantity"};
    }
    ClaimState c;
    c.id = e.claim;
    c.claimant = e.claimant;
    c.token = e.token;
    c.quantity = e.quantity;
    c.submitted_at = clock_;
    c.slots.resize(d.verifiers.size());
    claims_.emplace(e.claim, std::move(c));
    ++next_claim_id_;
    return {};
}

Engine::SlotDecision Engine::eval_window(const ClaimWindow& w, const AccountId& claimant,
                                         TokenId token, std::uint64_t new_claim_id) const {
    std::uint64_t recent = 0;
    for (const auto& [id, c] : claims_) {
        if (id >= new_claim_id) break;
        if (c.claimant != claimant || c.token != token) continue;
        auto horizon = checked_add(c.submitted_at, w.per_ticks);
        if (!horizon || *horizon > clock_) ++recent;
    }
    if (recent >= w.max_claims) return {false, RejectCode::WindowExceeded};
    return {true, std::nullopt};
}

Engine::SlotDecision Engine::eval_balance(const TokenBalanceThreshold& t,
                                          const AccountId& claimant) const {
    auto bal = balance_of(t.token, claimant);
    Balance held = bal.ok() ? bal.value() : 0;
    if (held < t.min_balance) return {false, RejectCode::BalanceBelowThreshold};
    return {true, std::nullopt};
}

// --- attestations ----------------------------------------------------------

Result<SlotStatus> Engine::submit_attestation(const Attestation& att) {
    auto it = claims_.find(att.claim);
    if (it == claims_.end()) return {Errc::UnknownClaim, std::to_string(att.claim)};
    ClaimState& c = it->second;
    if (c.status != ClaimStatus::Open)
        return {Errc::ClaimClosed, std::string(claim_status_name(c.status))};
    if (att.slot >= c.slots.size())
        return {Errc::IndexOutOfRange,
                "slot " + std::to_string(att.slot) + " of " + std::to_string(c.slots.size())};
    const TokenDesign& d = tokens_.at(c.token).record.design;
    const VerifierSpec& spec = d.verifiers[att.slot];
    if (!payload_matches(att.payload, spec)) return {Errc::PayloadMismatch, {}};
    ClaimSlot& slot = c.slots[att.slot];
    if (slot.status != SlotStatus::Pending) return {Errc::DuplicateAttestation, "slot decided"};

    if (const auto* v = std::get_if<ApproverVerdict>(&att.payload)) {
        const auto& da = std::get<DesignatedApprover>(spec);
        if (v->approver != da.approver) return {Errc::UnauthorizedAttestor, v->approver.hex()};
        emit(ProofRecorded{att.claim, att.slot, att.payload});
        emit(SlotDecided{att.claim, att.slot, v->approve,
                         v->approve ? std::optional<RejectCode>{}
                                    : std::optional<RejectCode>{RejectCode::ApproverRejected}});
    } else if (const auto* p = std::get_if<PeerEndorsement>(&att.payload)) {
        const auto& pq = std::get<PeerQuorum>(spec);
        if (std::find(pq.attestors.begin(), pq.attestors.end(), p->attestor) ==
            pq.attestors.end())
            return {Errc::UnauthorizedAttestor, p->attestor.hex()};
        if (slot.endorsements.count(p->attestor))
            return {Errc::DuplicateAttestation, "attestor already endorsed"};
        emit(ProofRecorded{att.claim, att.slot, att.payload});
        std::size_t approvals = 0;
        std::size_t rejections = 0;
        for (const auto& [who, approve] : slot.endorsements) (approve ? approvals : rejections)++;
        if (approvals >= pq.quorum) {
            emit(SlotDecided{att.claim, att.slot, true, std::nullopt});
        } else if (rejections > pq.attestors.size() - pq.quorum) {
            emit(SlotDecided{att.claim, att.slot, false, RejectCode::QuorumImpossible});
        }
    } else if (const auto* m = std::get_if<OracleMeasurement>(&att.payload)) {
        const auto& so = std::get<SensorOracle>(spec);
        if (!crypto::verify(so.oracle_key, sensor_message(att.claim, att.slot, m->measurement),
                            m->signature))
            return {Errc::BadOracleSignature, {}};
        bool ok = so.comparator == Comparator::GreaterEqual ? m->measurement >= so.threshold
                                                            : m->measurement <= so.threshold;
        emit(ProofRecorded{att.claim, att.slot, att.payload});
        emit(SlotDecided{att.claim, att.slot, ok,
                         ok ? std::optional<RejectCode>{}
                            : std::optional<RejectCode>{RejectCode::MeasurementOutOfRange}});
    } else if (const auto* oc = std::get_if<OracleCoordinate>(&att.payload)) {
        const auto& lv = std::get<LocationVerifier>(spec);
        if (!crypto::verify(lv.oracle_key,
                            location_message(att.claim, att.slot, oc->lat_e7, oc->lon_e7),
                            oc->signature))
            return {Errc::BadOracleSignature, {}};
        bool ok = inside_radius(lv, oc->lat_e7, oc->lon_e7);
        emit(ProofRecorded{att.claim, att.slot, att.payload});
        emit(SlotDecided{att.claim, att.slot, ok,
                         ok ? std::optional<RejectCode>{}
                            : std::optional<RejectCode>{RejectCode::OutsideRadius}});
    } else {
        emit(ProofRecorded{att.claim, att.slot, att.payload});  // content digest
        emit(SlotDecided{att.claim, att.slot, true, std::nullopt});
    }

    try_finalize(att.claim);
    return c.slots[att.slot].status;
}

Result<void> Engine::apply(const ProofRecorded& e) {
    auto it = claims_.find(e.claim);
    if (it == claims_.end()) return {Errc::UnknownClaim, std::to_string(e.claim)};
    ClaimState& c = it->second;
    if (c.status != ClaimStatus::Open) return {Errc::ClaimClosed, {}};
    if (e.slot >= c.slots.size()) return {Errc::IndexOutOfRange, {}};
    const VerifierSpec& spec = tokens_.at(c.token).record.design.verifiers[e.slot];
    if (!payload_matches(e.payload, spec)) return {Errc::PayloadMismatch, {}};
    ClaimSlot& slot = c.slots[e.slot];
    if (slot.status != SlotStatus::Pending) return {Errc::DuplicateAttestation, {}};

    if (const auto* v = std::get_if<ApproverVerdict>(&e.payload)) {
        if (v->approver != std::get<DesignatedApprover>(spec).approver)
            return {Errc::UnauthorizedAttestor, {}};
        slot.endorsements[v->approver] = v->approve;
    } else if (const auto* p = std::get_if<PeerEndorsement>(&e.payload)) {
        const auto& pq = std::get<PeerQuorum>(spec);
        if (std::find(pq.attestors.begin(), pq.attestors.end(), p->attestor) ==
            pq.attestors.end())
            return {Errc::UnauthorizedAttestor, {}};
        if (slot.endorsements.count(p->attestor)) return {Errc::DuplicateAttestation, {}};
        slot.endorsements[p->attestor] = p->approve;
    } else if (const auto* m = std::get_if<OracleMeasurement>(&e.payload)) {
        if (!crypto::verify(std::get<SensorOracle>(spec).oracle_key,
                            sensor_message(e.claim, e.slot, m->measurement), m->signature))
            return {Errc::BadOracleSignature, {}};
    } else if (const auto* oc = std::get_if<OracleCoordinate>(&e.payload)) {
        if (!crypto::verify(std::get<LocationVerifier>(spec).oracle_key,
                            location_message(e.claim, e.slot, oc->lat_e7, oc->lon_e7),
                            oc->signature))
            return {Errc::BadOracleSignature, {}};
    } else if (const auto* cd = std::get_if<ContentDigest>(&e.payload)) {
        slot.digest = cd->digest;
    }
    return {};
}

Result<void> Engine::apply(const SlotDecided& e) {
    auto it = claims_.find(e.claim);
    if (it == claims_.end()) return {Errc::UnknownClaim, std::to_string(e.claim)};
    ClaimState& c = it->second;
    if (c.status != ClaimStatus::Open) return {Errc::ClaimClosed, {}};
    if (e.slot >= c.slots.size()) return {Errc::IndexOutOfRange, {}};
    ClaimSlot& slot = c.slots[e.slot];
    if (slot.status != SlotStatus::Pending) return {Errc::DuplicateAttestation, {}};
    if (e.approved == e.code.has_value()) return corrupt("decision and reject code disagree");
    slot.status = e.approved ? SlotStatus::Approved : SlotStatus::Rejected;
    slot.code = e.code;
    if (!e.approved) c.status = ClaimStatus::Rejected;
    return {};
}

// --- finalization ----------------------------------------------------------

Balance Engine::claim_mint_amount(const ClaimState& c) const {
    const TokenDesign& d = tokens_.at(c.token).record.design;
    if (const auto* f = std::get_if<FixedPerClaim>(&d.minting_policy)) return f->units;
    const auto& p = std::get<ProportionalToQuantity>(d.minting_policy);
    return *checked_mul(p.unit_per_quantity, c.quantity);  // bounded at submission
}

bool Engine::all_slots_approved(const ClaimState& c) const {
    return std::all_of(c.slots.begin(), c.slots.end(),
                       [](const ClaimSlot& s) { return s.status == SlotStatus::Approved; });
}

void Engine::try_finalize(std::uint64_t claim_id) {
    const ClaimState& c = claims_.at(claim_id);
    if (c.status != ClaimStatus::Open || !all_slots_approved(c)) return;
    Balance amount = claim_mint_amount(c);
    AccountId claimant = c.claimant;
    bool mint_ok = can_mint(tokens_.at(c.token), amount).ok();
    bool rep_ok = can_mint(tokens_.at(kRepTokenId), config_.rep.rep_per_claim).ok();
    if (mint_ok && rep_ok) {
        emit(ClaimFinalized{claim_id, amount});
        emit(RepAwarded{claimant, config_.rep.rep_per_claim, RepReason::ClaimApproved});
    } else {
        emit(ClaimMintDeferred{claim_id, amount});
    }
}

Result<Balance> Engine::finalize_claim(std::uint64_t claim) {
    auto it = claims_.find(claim);
    if (it == claims_.end()) return {Errc::UnknownClaim, std::to_string(claim)};
    const ClaimState& c = it->second;
    if (c.status != ClaimStatus::Open)
        return {Errc::ClaimClosed, std::string(claim_status_name(c.status))};
    for (std::size_t i = 0; i < c.slots.size(); ++i) {
        if (c.slots[i].status != SlotStatus::Approved)
            return {Errc::NotAllApproved,
                    "slot " + std::to_string(i) + " " +
                        std::string(slot_status_name(c.slots[i].status))};
    }
    Balance amount = claim_mint_amount(c);
    AccountId claimant = c.claimant;
    auto mint_check = can_mint(tokens_.at(c.token), amount);
    auto rep_check = can_mint(tokens_.at(kRepTokenId), config_.rep.rep_per_claim);
    if (!mint_check.ok() || !rep_check.ok()) {
        emit(ClaimMintDeferred{claim, amount});
        return mint_check.ok() ? rep_check.error() : mint_check.error();
    }
    emit(ClaimFinalized{claim, amount});
    emit(RepAwarded{claimant, config_.rep.rep_per_claim, RepReason::ClaimApproved});
    return amount;
}

Result<void> Engine::apply(const ClaimFinalized& e) {
    auto it = claims_.find(e.claim);
    if (it == claims_.end()) return {Errc::UnknownClaim, std::to_string(e.claim)};
    ClaimState& c = it->second;
    if (c.status != ClaimStatus::Open) return {Errc::ClaimClosed, {}};
    if (!all_slots_approved(c)) return {Errc::NotAllApproved, {}};
    if (claim_mint_amount(c) != e.minted) return corrupt("minted amount mismatch");
    TokenState& t = tokens_.at(c.token);
    if (auto r = can_mint(t, e.minted); !r.ok()) return r;
    do_mint(t, c.claimant, e.minted);
    c.status = ClaimStatus::Approved;
    return {};
}

Result<void> Engine::apply(const ClaimMintDeferred& e) {
    auto it = claims_.find(e.claim);
    if (it == claims_.end()) return {Errc::UnknownClaim, std::to_string(e.claim)};
    const ClaimState& c = it->second;
    if (c.status != ClaimStatus::Open) return {Errc::ClaimClosed, {}};
    if (!all_slots_approved(c)) return {Errc::NotAllApproved, {}};
    if (claim_mint_amount(c) != e.requested) return corrupt("deferred amount mismatch");
    return {};  // audit record; the claim stays open for a later retry
}

const ClaimState* Engine::find_claim(std::uint64_t claim) const {
    auto it = claims_.find(claim);
    return it == claims_.end() ? nullptr : &it->second;
}

}  // namespace patlab
