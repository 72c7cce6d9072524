#include "patlab/engine.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "patlab/crypto.hpp"
#include "patlab/event_codec.hpp"

namespace patlab {

namespace {

Error corrupt(std::string detail) { return Error{Errc::CorruptLog, std::move(detail)}; }

TokenDesign rep_design() {
    TokenDesign d;
    d.name = "Reputation";
    d.symbol = "REP";
    d.supply = SupplyUncapped{};
    d.burnable = false;
    d.transferable = false;
    d.minting_policy = FixedPerClaim{1};
    return d;
}

TokenDesign gov_design(bool transferable) {
    TokenDesign d;
    d.name = "Governance";
    d.symbol = "GOV";
    d.supply = SupplyUncapped{};
    d.burnable = false;
    d.transferable = transferable;
    d.minting_policy = FixedPerClaim{1};
    return d;
}

}  // namespace

Balance GovAccount::out_total() const {
    Balance sum = 0;
    for (const auto& [to, amount] : delegated_out) sum += amount;
    return sum;
}

Balance GovAccount::in_total() const {
    Balance sum = 0;
    for (const auto& [from, amount] : delegated_in) sum += amount;
    return sum;
}

// --- construction ----------------------------------------------------------

Result<Engine> Engine::create(EngineConfig cfg) {
    if (auto v = validate_config(cfg); !v.ok()) return v.error();
    Engine eng;
    eng.emit(Genesis{std::move(cfg)});
    return eng;
}

Result<Engine> Engine::replay(const std::vector<EventRecord>& records) {
    return replay(records, ReplayObserver{});
}

Result<Engine> Engine::replay(const std::vector<EventRecord>& records,
                              const ReplayObserver& after_record) {
    LogVerifyResult chain = verify_records(records);
    if (!chain.ok)
        return Error{Errc::CorruptLog,
                     "seq " + std::to_string(chain.first_bad_seq) + ": " + chain.reason};
    if (records.empty()) return Error{Errc::CorruptLog, "empty log"};
    Engine eng;
    for (const EventRecord& rec : records) {
        auto applied = eng.apply_event(rec.event);
        if (!applied.ok()) {
            std::string why(errc_name(applied.code()));
            if (!applied.error().detail.empty()) why += ": " + applied.error().detail;
            return Error{Errc::CorruptLog, "seq " + std::to_string(rec.seq) + ": " + why};
        }
        eng.records_.push_back(rec);
        if (after_record) after_record(eng, rec);
    }
    return eng;
}

void Engine::emit(Event ev) {
    auto applied = apply_event(ev);
    if (!applied.ok()) {
        std::string why(errc_name(applied.code()));
        if (!applied.error().detail.empty()) why += ": " + applied.error().detail;
        throw std::logic_error("emit rejected by applier: " + why);
    }
    EventRecord rec;
    rec.seq = records_.size();
    if (!records_.empty()) rec.prev_hash = records_.back().hash;
    rec.time = clock_;  // clock after the event took effect
    rec.event = std::move(ev);
    rec.hash = record_hash(rec.prev_hash, canonical_json(rec.event), rec.seq);
    records_.push_back(std::move(rec));
}

Result<void> Engine::apply_event(const Event& ev) {
    return std::visit([this](const auto& e) { return apply(e); }, ev);
}

// --- shared helpers --------------------------------------------------------

TokenState* Engine::token_mut(TokenId id) {
    auto it = tokens_.find(id);
    return it == tokens_.end() ? nullptr : &it->second;
}

const TokenState* Engine::find_token(TokenId token) const {
    auto it = tokens_.find(token);
    return it == tokens_.end() ? nullptr : &it->second;
}

Result<void> Engine::can_mint(const TokenState& t, Balance amount) const {
    auto total = checked_add(t.minted, amount);
    if (!total) return {Errc::Overflow, "minted total overflows"};
    if (const auto* cap = std::get_if<SupplyCapped>(&t.record.design.supply)) {
        if (*total > cap->max)
            return {Errc::SupplyCapExceeded,
                    t.record.design.symbol + " cap " + std::to_string(cap->max)};
    }
    return {};
}

void Engine::do_mint(TokenState& t, const AccountId& to, Balance amount) {
    t.minted += amount;
    credit(t, to, amount);
}

void Engine::credit(TokenState& t, const AccountId& to, Balance amount) {
    if (amount == 0) return;
    t.balances[to] += amount;
}

void Engine::debit(TokenState& t, const AccountId& from, Balance amount) {
    if (amount == 0) return;
    auto it = t.balances.find(from);
    it->second -= amount;
    if (it->second == 0) t.balances.erase(it);
}

Result<void> Engine::check_transfer(TokenId token, const AccountId& from, Balance amount) const {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const TokenState& t = it->second;
    if (!t.record.design.transferable)
        return {Errc::NonTransferable, t.record.design.symbol};
    auto bal = t.balances.find(from);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < amount)
        return {Errc::InsufficientBalance,
                "has " + std::to_string(owned) + ", needs " + std::to_string(amount)};
    if (token == kGovTokenId) {
        // Delegated-out and locked units stay with the account on the ledger
        // but are not spendable.
        auto g = gov_.find(from);
        if (g != gov_.end()) {
            Balance out = g->second.out_total();
            if (owned - out < amount)
                return {Errc::InsufficientBalance, "units delegated away"};
            if (effective_gov(from) < amount)
                return {Errc::InsufficientBalance, "units locked"};
        }
    }
    return {};
}

Result<void> Engine::check_gov_lock(const AccountId& account, Balance amount) const {
    if (effective_gov(account) < amount)
        return {Errc::InsufficientGov, "effective " + std::to_string(effective_gov(account)) +
                                           ", needs " + std::to_string(amount)};
    return {};
}

void Engine::gov_lock(const AccountId& account, Balance amount) {
    if (amount == 0) return;
    gov_[account].locked += amount;
}

void Engine::gov_unlock(const AccountId& account, Balance amount) {
    if (amount == 0) return;
    gov_[account].locked -= amount;
    prune_gov(account);
}

void Engine::prune_gov(const AccountId& account) {
    auto it = gov_.find(account);
    if (it == gov_.end()) return;
    const GovAccount& g = it->second;
    if (g.locked == 0 && g.delegated_out.empty() && g.delegated_in.empty()) gov_.erase(it);
}

std::vector<PayoutEntry> Engine::plan_seizure(const AccountId& loser, Balance amount,
                                              Balance locked_override) const {
    Balance owned = gov_of(loser);
    const GovAccount* g = nullptr;
    if (auto it = gov_.find(loser); it != gov_.end()) g = &it->second;
    Balance out = g ? g->out_total() : 0;
    Balance free_units = owned - out;  // out_total never exceeds owned
    free_units = free_units > locked_override ? free_units - locked_override : 0;
    Balance remaining = amount > free_units ? amount - free_units : 0;
    std::vector<PayoutEntry> plan;
    if (remaining > 0 && g) {
        for (const auto& [delegator, held] : g->delegated_in) {
            Balance take = std::min(remaining, held);
            if (take > 0) plan.push_back({delegator, take});
            remaining -= take;
            if (remaining == 0) break;
        }
    }
    return plan;  // incomplete coverage is the caller's feasibility check
}

void Engine::gov_seize(const AccountId& loser, Balance amount,
                       const std::vector<PayoutEntry>& plan) {
    Balance from_delegations = 0;
    for (const auto& entry : plan) from_delegations += entry.amount;
    Balance from_owned = amount - from_delegations;
    TokenState& gov = *token_mut(kGovTokenId);
    debit(gov, loser, from_owned);
    for (const auto& entry : plan) {
        GovAccount& gl = gov_[loser];
        auto in = gl.delegated_in.find(entry.account);
        in->second -= entry.amount;
        if (in->second == 0) gl.delegated_in.erase(in);
        GovAccount& gd = gov_[entry.account];
        auto out = gd.delegated_out.find(loser);
        out->second -= entry.amount;
        if (out->second == 0) gd.delegated_out.erase(out);
        debit(gov, entry.account, entry.amount);
        prune_gov(entry.account);
    }
    prune_gov(loser);
}

Balance Engine::gov_entitlement(const AccountId& account) const {
    Balance rep = rep_of(account);
    Balance levels = rep / config_.rep.gov_threshold;
    auto units = checked_mul(levels, config_.rep.gov_per_level);
    return units ? *units : std::numeric_limits<Balance>::max();
}

std::vector<DesignViolation> Engine::state_violations(const TokenDesign& d) const {
    std::vector<DesignViolation> out;
    for (const auto& v : d.verifiers) {
        if (const auto* tb = std::get_if<TokenBalanceThreshold>(&v)) {
            if (tokens_.count(tb->token) == 0) out.push_back(DesignViolation::UnknownReferencedToken);
        }
    }
    for (const auto& s : d.sources_of_value) {
        TokenId ref = 0;
        bool has_ref = false;
        if (const auto* sp = std::get_if<SwapPool>(&s)) {
            ref = sp->backing_token;
            has_ref = true;
        } else if (const auto* mc = std::get_if<MintConversion>(&s)) {
            ref = mc->target_token;
            has_ref = true;
        } else if (const auto* cb = std::get_if<CoupledBurn>(&s)) {
            ref = cb->coupled_token;
            has_ref = true;
        }
        if (!has_ref) continue;
        if (is_system_token(ref))
            out.push_back(DesignViolation::SystemTokenReference);
        else if (tokens_.count(ref) == 0)
            out.push_back(DesignViolation::UnknownReferencedToken);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// --- genesis & time --------------------------------------------------------

Result<void> Engine::apply(const Genesis& e) {
    if (!tokens_.empty()) return corrupt("duplicate genesis");
    if (auto v = validate_config(e.config); !v.ok())
        return corrupt("genesis config: " + v.error().detail);
    config_ = e.config;

    TokenState rep;
    rep.record = TokenRecord{kRepTokenId, rep_design(), AccountId{}, 0, CuratedStatus::NotListed};
    tokens_.emplace(kRepTokenId, std::move(rep));

    TokenState gov;
    gov.record = TokenRecord{kGovTokenId, gov_design(config_.gov_transferable), AccountId{}, 0,
                             CuratedStatus::NotListed};
    tokens_.emplace(kGovTokenId, std::move(gov));
    return {};
}

Result<Tick> Engine::advance_time(std::uint64_t ticks) {
    if (ticks == 0) return {Errc::ZeroTicks, {}};
    if (!checked_add(clock_, ticks)) return {Errc::Overflow, "clock"};
    emit(TimeAdvanced{ticks});
    return clock_;
}

Result<void> Engine::apply(const TimeAdvanced& e) {
    if (e.ticks == 0) return {Errc::ZeroTicks, {}};
    auto next = checked_add(clock_, e.ticks);
    if (!next) return {Errc::Overflow, "clock"};
    clock_ = *next;
    return {};
}

// --- ledger ----------------------------------------------------------------

Result<void> Engine::transfer(TokenId token, const AccountId& from, const AccountId& to,
                              Balance amount) {
    if (auto c = check_transfer(token, from, amount); !c.ok()) return c;
    emit(Transferred{token, from, to, amount});
    return {};
}

Result<void> Engine::apply(const Transferred& e) {
    if (auto c = check_transfer(e.token, e.from, e.amount); !c.ok()) return c;
    if (e.amount == 0 || e.from == e.to) return {};
    TokenState& t = *token_mut(e.token);
    debit(t, e.from, e.amount);
    credit(t, e.to, e.amount);
    return {};
}

Result<void> Engine::burn_units(TokenId token, const AccountId& from, Balance amount) {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const TokenState& t = it->second;
    if (!t.record.design.burnable) return {Errc::NotBurnable, t.record.design.symbol};
    auto bal = t.balances.find(from);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < amount)
        return {Errc::InsufficientBalance,
                "has " + std::to_string(owned) + ", needs " + std::to_string(amount)};
    emit(Burned{token, from, amount});
    return {};
}

Result<void> Engine::apply(const Burned& e) {
    auto it = tokens_.find(e.token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(e.token)};
    TokenState& t = it->second;
    if (!t.record.design.burnable) return {Errc::NotBurnable, t.record.design.symbol};
    auto bal = t.balances.find(e.from);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < e.amount) return {Errc::InsufficientBalance, {}};
    debit(t, e.from, e.amount);
    t.burned += e.amount;
    return {};
}

Result<Balance> Engine::balance_of(TokenId token, const AccountId& account) const {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    auto bal = it->second.balances.find(account);
    return bal == it->second.balances.end() ? Balance{0} : bal->second;
}

Result<Balance> Engine::total_supply(TokenId token) const {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    return it->second.supply();
}

// --- token factory ---------------------------------------------------------

Result<TokenId> Engine::create_token(const AccountId& creator, const TokenDesign& design) {
    auto violations = validate_design(design);
    auto state_v = state_violations(design);
    violations.insert(violations.end(), state_v.begin(), state_v.end());
    if (!violations.empty()) {
        std::string detail;
        for (const auto& v : violations) {
            if (!detail.empty()) detail += ", ";
            detail += violation_name(v);
        }
        return {Errc::InvalidDesign, std::move(detail)};
    }
    if (next_token_id_ > kMaxUserTokenId) return {Errc::Overflow, "token id space exhausted"};
    if (auto r = can_mint(tokens_.at(kRepTokenId), config_.rep.rep_per_creation); !r.ok())
        return r.error();

    TokenId id = next_token_id_;
    emit(TokenCreated{id, creator, design});
    emit(RepAwarded{creator, config_.rep.rep_per_creation, RepReason::TokenCreated});
    return id;
}

Result<void> Engine::apply(const TokenCreated& e) {
    if (e.token != next_token_id_ || e.token > kMaxUserTokenId)
        return corrupt("token id out of sequence");
    if (!validate_design(e.design).empty() || !state_violations(e.design).empty())
        return {Errc::InvalidDesign, "design rejected on replay"};
    TokenState t;
    t.record = TokenRecord{e.token, e.design, e.creator, clock_, CuratedStatus::NotListed};
    Balance premint = 0;
    AccountId premint_to;
    if (const auto* p = std::get_if<PremintPartial>(&e.design.unconditional_creation)) {
        premint = p->amount;
        premint_to = p->to;
    } else if (const auto* a = std::get_if<PremintAll>(&e.design.unconditional_creation)) {
        premint = a->amount;
        premint_to = a->to;
    }
    if (premint > 0) {
        if (auto r = can_mint(t, premint); !r.ok()) return r;
        do_mint(t, premint_to, premint);
    }
    tokens_.emplace(e.token, std::move(t));
    ++next_token_id_;
    return {};
}

Result<void> Engine::apply(const RepAwarded& e) {
    if (e.amount == 0) return corrupt("zero rep award");
    TokenState& rep = *token_mut(kRepTokenId);
    if (auto r = can_mint(rep, e.amount); !r.ok()) return r;
    do_mint(rep, e.account, e.amount);
    return {};
}

std::vector<TokenId> Engine::list_tokens(bool curated_only) const {
    std::vector<TokenId> out;
    for (const auto& [id, t] : tokens_) {
        if (is_system_token(id)) continue;
        if (curated_only && registry_.count(id) == 0) continue;
        out.push_back(id);
    }
    return out;
}

// --- reputation & governance ----------------------------------------------

Balance Engine::rep_of(const AccountId& account) const {
    auto it = tokens_.find(kRepTokenId);
    if (it == tokens_.end()) return 0;
    auto bal = it->second.balances.find(account);
    return bal == it->second.balances.end() ? 0 : bal->second;
}

Balance Engine::gov_of(const AccountId& account) const {
    auto it = tokens_.find(kGovTokenId);
    if (it == tokens_.end()) return 0;
    auto bal = it->second.balances.find(account);
    return bal == it->second.balances.end() ? 0 : bal->second;
}

Balance Engine::effective_gov(const AccountId& account) const {
    __int128 eff = static_cast<__int128>(gov_of(account));
    if (auto it = gov_.find(account); it != gov_.end()) {
        const GovAccount& g = it->second;
        eff += static_cast<__int128>(g.in_total());
        eff -= static_cast<__int128>(g.out_total());
        eff -= static_cast<__int128>(g.locked);
    }
    if (eff < 0) return 0;
    return static_cast<Balance>(eff);
}

Balance Engine::locked_gov(const AccountId& account) const {
    auto it = gov_.find(account);
    return it == gov_.end() ? 0 : it->second.locked;
}

Balance Engine::gov_claimed(const AccountId& account) const {
    auto it = gov_claimed_.find(account);
    return it == gov_claimed_.end() ? 0 : it->second;
}

Result<Balance> Engine::claim_gov(const AccountId& account) {
    Balance entitlement = gov_entitlement(account);
    Balance claimed = gov_claimed(account);
    if (entitlement <= claimed) return Balance{0};
    Balance delta = entitlement - claimed;
    if (auto r = can_mint(tokens_.at(kGovTokenId), delta); !r.ok()) return r.error();
    emit(GovClaimed{account, delta});
    return delta;
}

Result<void> Engine::apply(const GovClaimed& e) {
    Balance entitlement = gov_entitlement(e.account);
    Balance claimed = gov_claimed(e.account);
    Balance expected = entitlement > claimed ? entitlement - claimed : 0;
    if (e.amount == 0 || e.amount != expected) return corrupt("governance claim mismatch");
    TokenState& gov = *token_mut(kGovTokenId);
    if (auto r = can_mint(gov, e.amount); !r.ok()) return r;
    do_mint(gov, e.account, e.amount);
    gov_claimed_[e.account] = claimed + e.amount;
    return {};
}

Result<void> Engine::delegate_gov(const AccountId& from, const AccountId& to, Balance amount) {
    if (amount == 0) return {};
    Balance owned = gov_of(from);
    Balance out = 0;
    Balance locked = 0;
    if (auto it = gov_.find(from); it != gov_.end()) {
        out = it->second.out_total();
        locked = it->second.locked;
    }
    Balance avail = owned - out;
    avail = avail > locked ? avail - locked : 0;
    if (avail < amount)
        return {Errc::InsufficientGov,
                "delegable " + std::to_string(avail) + ", needs " + std::to_string(amount)};
    emit(GovDelegated{from, to, amount});
    return {};
}

Result<void> Engine::apply(const GovDelegated& e) {
    if (e.amount == 0) return corrupt("zero delegation");
    Balance owned = gov_of(e.from);
    Balance out = 0;
    Balance locked = 0;
    if (auto it = gov_.find(e.from); it != gov_.end()) {
        out = it->second.out_total();
        locked = it->second.locked;
    }
    Balance avail = owned - out;
    avail = avail > locked ? avail - locked : 0;
    if (avail < e.amount) return {Errc::InsufficientGov, {}};
    gov_[e.from].delegated_out[e.to] += e.amount;
    gov_[e.to].delegated_in[e.from] += e.amount;
    return {};
}

Result<void> Engine::revoke_delegation(const AccountId& from, const AccountId& to,
                                       Balance amount) {
    if (amount == 0) return {};
    Balance current = 0;
    if (auto it = gov_.find(from); it != gov_.end()) {
        auto d = it->second.delegated_out.find(to);
        if (d != it->second.delegated_out.end()) current = d->second;
    }
    if (current < amount)
        return {Errc::NoSuchDelegation,
                "delegated " + std::to_string(current) + ", needs " + std::to_string(amount)};
    if (effective_gov(to) < amount)
        return {Errc::DelegationLocked, "delegatee effective " + std::to_string(effective_gov(to))};
    emit(DelegationRevoked{from, to, amount});
    return {};
}

Result<void> Engine::apply(const DelegationRevoked& e) {
    if (e.amount == 0) return corrupt("zero revocation");
    auto from_it = gov_.find(e.from);
    if (from_it == gov_.end()) return {Errc::NoSuchDelegation, {}};
    auto d = from_it->second.delegated_out.find(e.to);
    if (d == from_it->second.delegated_out.end() || d->second < e.amount)
        return {Errc::NoSuchDelegation, {}};
    if (effective_gov(e.to) < e.amount) return {Errc::DelegationLocked, {}};
    d->second -= e.amount;
    if (d->second == 0) from_it->second.delegated_out.erase(d);
    GovAccount& gt = gov_[e.to];
    auto in = gt.delegated_in.find(e.from);
    in->second -= e.amount;
    if (in->second == 0) gt.delegated_in.erase(in);
    prune_gov(e.to);
    prune_gov(e.from);
    return {};
}

// --- value backing ---------------------------------------------------------

namespace {

const SwapPool* first_swap_pool(const TokenDesign& d) {
    for (const auto& s : d.sources_of_value)
        if (const auto* sp = std::get_if<SwapPool>(&s)) return sp;
    return nullptr;
}

const MintConversion* first_conversion(const TokenDesign& d) {
    for (const auto& s : d.sources_of_value)
        if (const auto* mc = std::get_if<MintConversion>(&s)) return mc;
    return nullptr;
}

const CoupledBurn* first_coupled(const TokenDesign& d) {
    for (const auto& s : d.sources_of_value)
        if (const auto* cb = std::get_if<CoupledBurn>(&s)) return cb;
    return nullptr;
}

}  // namespace

AccountId Engine::pool_custody_account(TokenId token) {
    Hash32 h = crypto::sha256("pool:" + std::to_string(token));
    AccountId a;
    a.bytes = h;
    return a;
}

Result<Balance> Engine::pool_balance(TokenId token) const {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const SwapPool* sp = first_swap_pool(it->second.record.design);
    if (!sp) return {Errc::NoSwapPool, it->second.record.design.symbol};
    auto backing = tokens_.find(sp->backing_token);
    if (backing == tokens_.end()) return {Errc::UnknownToken, "backing token"};
    auto bal = backing->second.balances.find(pool_custody_account(token));
    return bal == backing->second.balances.end() ? Balance{0} : bal->second;
}

Result<Balance> Engine::deposit_to_pool(const AccountId& depositor, TokenId token,
                                        Balance amount) {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const SwapPool* sp = first_swap_pool(it->second.record.design);
    if (!sp) return {Errc::NoSwapPool, it->second.record.design.symbol};
    if (amount == 0) return pool_balance(token);
    if (auto c = check_transfer(sp->backing_token, depositor, amount); !c.ok()) return c.error();
    emit(PoolDeposited{token, depositor, amount});
    return pool_balance(token);
}

Result<void> Engine::apply(const PoolDeposited& e) {
    auto it = tokens_.find(e.token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(e.token)};
    const SwapPool* sp = first_swap_pool(it->second.record.design);
    if (!sp) return {Errc::NoSwapPool, {}};
    if (e.amount == 0) return corrupt("zero deposit");
    if (auto c = check_transfer(sp->backing_token, e.depositor, e.amount); !c.ok()) return c;
    TokenState& backing = *token_mut(sp->backing_token);
    debit(backing, e.depositor, e.amount);
    credit(backing, pool_custody_account(e.token), e.amount);
    return {};
}

Result<Balance> Engine::swap_redeem(const AccountId& holder, TokenId token, Balance units) {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const TokenState& t = it->second;
    const SwapPool* sp = first_swap_pool(t.record.design);
    if (!sp) return {Errc::NoSwapPool, t.record.design.symbol};
    if (units == 0) return Balance{0};
    auto bal = t.balances.find(holder);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < units)
        return {Errc::InsufficientBalance,
                "has " + std::to_string(owned) + ", needs " + std::to_string(units)};
    Balance pool = pool_balance(token).value();
    if (pool == 0) return {Errc::EmptyPool, t.record.design.symbol};
    Balance payout = *muldiv_floor(pool, units, t.supply());
    emit(SwapRedeemed{token, holder, units, payout});
    return payout;
}

Result<void> Engine::apply(const SwapRedeemed& e) {
    auto it = tokens_.find(e.token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(e.token)};
    TokenState& t = it->second;
    const SwapPool* sp = first_swap_pool(t.record.design);
    if (!sp) return {Errc::NoSwapPool, {}};
    if (e.units == 0) return corrupt("zero redemption");
    auto bal = t.balances.find(e.redeemer);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < e.units) return {Errc::InsufficientBalance, {}};
    auto pool_now = pool_balance(e.token);
    if (!pool_now.ok() || pool_now.value() == 0) return {Errc::EmptyPool, {}};
    Balance expected = *muldiv_floor(pool_now.value(), e.units, t.supply());
    if (expected != e.payout) return corrupt("redemption payout mismatch");
    debit(t, e.redeemer, e.units);
    t.burned += e.units;
    TokenState& backing = *token_mut(sp->backing_token);
    debit(backing, pool_custody_account(e.token), e.payout);
    credit(backing, e.redeemer, e.payout);
    return {};
}

Result<Balance> Engine::mint_convert(const AccountId& holder, TokenId token, Balance amount) {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const TokenState& t = it->second;
    const MintConversion* mc = first_conversion(t.record.design);
    if (!mc) return {Errc::NoMintConversion, t.record.design.symbol};
    if (amount == 0) return Balance{0};
    if (!t.record.design.burnable) return {Errc::NotBurnable, t.record.design.symbol};
    auto bal = t.balances.find(holder);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < amount)
        return {Errc::InsufficientBalance,
                "has " + std::to_string(owned) + ", needs " + std::to_string(amount)};
    auto minted = muldiv_floor(amount, mc->rate_num, mc->rate_den);
    if (!minted) return {Errc::Overflow, "conversion product"};
    if (auto r = can_mint(tokens_.at(mc->target_token), *minted); !r.ok()) return r.error();
    emit(MintConverted{token, holder, amount, *minted});
    return *minted;
}

Result<void> Engine::apply(const MintConverted& e) {
    auto it = tokens_.find(e.token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(e.token)};
    TokenState& t = it->second;
    const MintConversion* mc = first_conversion(t.record.design);
    if (!mc) return {Errc::NoMintConversion, {}};
    if (e.burned == 0) return corrupt("zero conversion");
    if (!t.record.design.burnable) return {Errc::NotBurnable, {}};
    auto bal = t.balances.find(e.account);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < e.burned) return {Errc::InsufficientBalance, {}};
    auto minted = muldiv_floor(e.burned, mc->rate_num, mc->rate_den);
    if (!minted || *minted != e.minted) return corrupt("conversion amount mismatch");
    TokenState& target = *token_mut(mc->target_token);
    if (auto r = can_mint(target, e.minted); !r.ok()) return r;
    debit(t, e.account, e.burned);
    t.burned += e.burned;
    do_mint(target, e.account, e.minted);
    return {};
}

Result<void> Engine::coupled_burn(const AccountId& holder, TokenId token, Balance amount) {
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(token)};
    const TokenState& t = it->second;
    const CoupledBurn* cb = first_coupled(t.record.design);
    if (!cb) return {Errc::NoCoupledBurn, t.record.design.symbol};
    if (amount == 0) return {};
    if (!t.record.design.burnable) return {Errc::NotBurnable, t.record.design.symbol};
    const TokenState& coupled = tokens_.at(cb->coupled_token);
    if (!coupled.record.design.burnable)
        return {Errc::NotBurnable, coupled.record.design.symbol};
    auto bal = t.balances.find(holder);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < amount)
        return {Errc::InsufficientBalance,
                "has " + std::to_string(owned) + ", needs " + std::to_string(amount)};
    AccountId source = config_.coupled_burn_source == BurnSource::Custody
                           ? pool_custody_account(token)
                           : holder;
    auto cbal = coupled.balances.find(source);
    Balance held = cbal == coupled.balances.end() ? 0 : cbal->second;
    if (held < amount)
        return {Errc::InsufficientCoupledBalance,
                "holds " + std::to_string(held) + ", needs " + std::to_string(amount)};
    emit(CoupledBurned{token, holder, amount});
    return {};
}

Result<void> Engine::apply(const CoupledBurned& e) {
    auto it = tokens_.find(e.token);
    if (it == tokens_.end()) return {Errc::UnknownToken, std::to_string(e.token)};
    TokenState& t = it->second;
    const CoupledBurn* cb = first_coupled(t.record.design);
    if (!cb) return {Errc::NoCoupledBurn, {}};
    if (e.amount == 0) return corrupt("zero coupled burn");
    if (!t.record.design.burnable) return {Errc::NotBurnable, {}};
    TokenState& coupled = *token_mut(cb->coupled_token);
    if (!coupled.record.design.burnable) return {Errc::NotBurnable, {}};
    auto bal = t.balances.find(e.account);
    Balance owned = bal == t.balances.end() ? 0 : bal->second;
    if (owned < e.amount) return {Errc::InsufficientBalance, {}};
    AccountId source = config_.coupled_burn_source == BurnSource::Custody
                           ? pool_custody_account(e.token)
                           : e.account;
    auto cbal = coupled.balances.find(source);
    Balance held = cbal == coupled.balances.end() ? 0 : cbal->second;
    if (held < e.amount) return {Errc::InsufficientCoupledBalance, {}};
    debit(t, e.account, e.amount);
    t.burned += e.amount;
    debit(coupled, source, e.amount);
    coupled.burned += e.amount;
    return {};
}

}  // namespace patlab
