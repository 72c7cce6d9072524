#include "patlab/token_design.hpp"

#include <algorithm>

namespace patlab {

namespace {

bool symbol_ok(const std::string& s) {
    if (s.empty() || s.size() > 8) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

bool utf8_ok(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t extra;
        unsigned cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            extra = 1;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        static constexpr unsigned kMin[4] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMin[extra]) return false;              // overlong
        if (cp > 0x10ffff) return false;                 // out of range
        if (cp >= 0xd800 && cp <= 0xdfff) return false;  // surrogate
        i += extra + 1;
    }
    return true;
}

Balance premint_amount(const UnconditionalCreation& u) {
    if (const auto* p = std::get_if<PremintPartial>(&u)) return p->amount;
    if (const auto* a = std::get_if<PremintAll>(&u)) return a->amount;
    return 0;
}

}  // namespace

std::string_view violation_name(DesignViolation v) {
    switch (v) {
        case DesignViolation::EmptyName: return "EmptyName";
        case DesignViolation::NameTooLong: return "NameTooLong";
        case DesignViolation::InvalidUtf8: return "InvalidUtf8";
        case DesignViolation::BadSymbol: return "BadSymbol";
        case DesignViolation::CreationConditionUnsupported: return "CreationConditionUnsupported";
        case DesignViolation::PreMintExceedsCap: return "PreMintExceedsCap";
        case DesignViolation::PremintWithVerifiers: return "PremintWithVerifiers";
        case DesignViolation::BadMintingPolicy: return "BadMintingPolicy";
        case DesignViolation::BadPeerQuorum: return "BadPeerQuorum";
        case DesignViolation::BadSensorOracle: return "BadSensorOracle";
        case DesignViolation::BadLocationRadius: return "BadLocationRadius";
        case DesignViolation::BadClaimWindow: return "BadClaimWindow";
        case DesignViolation::BadConversionRate: return "BadConversionRate";
        case DesignViolation::UnknownReferencedToken: return "UnknownReferencedToken";
        case DesignViolation::SystemTokenReference: return "SystemTokenReference";
    }
    return "Unknown";
}

std::string_view comparator_name(Comparator c) {
    return c == Comparator::GreaterEqual ? "GreaterEqual" : "LessEqual";
}

std::string_view creation_condition_name(CreationCondition c) {
    switch (c) {
        case CreationCondition::Action: return "Action";
        case CreationCondition::Consensus: return "Consensus";
        case CreationCondition::Both: return "Both";
    }
    return "Unknown";
}

std::string_view curated_status_name(CuratedStatus s) {
    switch (s) {
        case CuratedStatus::NotListed: return "NotListed";
        case CuratedStatus::Applied: return "Applied";
        case CuratedStatus::Listed: return "Listed";
        case CuratedStatus::Challenged: return "Challenged";
    }
    return "Unknown";
}

std::vector<DesignViolation> validate_design(const TokenDesign& d) {
    std::vector<DesignViolation> out;

    if (d.name.empty()) out.push_back(DesignViolation::EmptyName);
    if (d.name.size() > 128) out.push_back(DesignViolation::NameTooLong);
    if (!utf8_ok(d.name)) out.push_back(DesignViolation::InvalidUtf8);
    if (!symbol_ok(d.symbol)) out.push_back(DesignViolation::BadSymbol);

    if (d.creation_condition != CreationCondition::Action)
        out.push_back(DesignViolation::CreationConditionUnsupported);

    if (const auto* cap = std::get_if<SupplyCapped>(&d.supply)) {
        if (premint_amount(d.unconditional_creation) > cap->max)
            out.push_back(DesignViolation::PreMintExceedsCap);
    }

    // PremintAll means the full supply exists up front, so action-based
    // verifiers would never have anything left to mint.
    if (std::holds_alternative<PremintAll>(d.unconditional_creation) && !d.verifiers.empty())
        out.push_back(DesignViolation::PremintWithVerifiers);

    if (const auto* f = std::get_if<FixedPerClaim>(&d.minting_policy)) {
        if (f->units == 0) out.push_back(DesignViolation::BadMintingPolicy);
    } else if (const auto* p = std::get_if<ProportionalToQuantity>(&d.minting_policy)) {
        if (p->unit_per_quantity == 0) out.push_back(DesignViolation::BadMintingPolicy);
    }

    for (const auto& v : d.verifiers) {
        if (const auto* q = std::get_if<PeerQuorum>(&v)) {
            bool ok = q->quorum >= 1 && q->quorum <= q->attestors.size();
            // Duplicate attestors would let one account count twice.
            std::vector<AccountId> uniq(q->attestors);
            std::sort(uniq.begin(), uniq.end());
            if (std::adjacent_find(uniq.begin(), uniq.end()) != uniq.end()) ok = false;
            if (!ok) out.push_back(DesignViolation::BadPeerQuorum);
        } else if (const auto* lv = std::get_if<LocationVerifier>(&v)) {
            if (lv->radius_m < 1) out.push_back(DesignViolation::BadLocationRadius);
        } else if (const auto* w = std::get_if<ClaimWindow>(&v)) {
            if (w->per_ticks < 1 || w->max_claims < 1)
                out.push_back(DesignViolation::BadClaimWindow);
        }
    }

    for (const auto& s : d.sources_of_value) {
        if (const auto* mc = std::get_if<MintConversion>(&s)) {
            if (mc->rate_den < 1 || mc->rate_num < 1)
                out.push_back(DesignViolation::BadConversionRate);
        } else if (const auto* note = std::get_if<ExternalNote>(&s)) {
            if (!utf8_ok(note->text)) out.push_back(DesignViolation::InvalidUtf8);
        }
    }

    return out;
}

}  // namespace patlab
