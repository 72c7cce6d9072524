#include <algorithm>
#include <string>
#include <utility>

#include "patlab/crypto.hpp"
#include "patlab/engine.hpp"

namespace patlab {

std::string_view proceeding_kind_name(ProceedingKind k) {
    switch (k) {
        case ProceedingKind::Add: return "Add";
        case ProceedingKind::Remove: return "Remove";
        case ProceedingKind::Defense: return "Defense";
    }
    return "?";
}

namespace {

Error corrupt(std::string detail) { return Error{Errc::CorruptLog, std::move(detail)}; }

bool same_payouts(const std::vector<PayoutEntry>& a, const std::vector<PayoutEntry>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].account != b[i].account || a[i].amount != b[i].amount) return false;
    return true;
}

}  // namespace

PollResolution resolve_tally(const PollTally& tally) {
    PollResolution r;
    unsigned __int128 weight_for = 0;
    unsigned __int128 weight_all = 0;
    for (const auto& [voter, stake, choice] : tally.reveals) {
        weight_all += stake;
        if (choice == VoteChoice::For) weight_for += stake;
    }
    if (weight_all == 0)
        r.outcome = PollOutcome::ChallengerWins;
    else
        r.outcome = weight_for * 100 >= weight_all * tally.quorum_pct
                        ? PollOutcome::ListingWins
                        : PollOutcome::ChallengerWins;

    Balance pot = r.outcome == PollOutcome::ListingWins ? tally.challenger_deposit
                                                        : tally.applicant_deposit;
    r.party_cut = *muldiv_floor(pot, tally.dispensation_pct, 100);
    Balance rest = pot - r.party_cut;

    VoteChoice winning_side =
        r.outcome == PollOutcome::ListingWins ? VoteChoice::For : VoteChoice::Against;
    std::vector<std::pair<AccountId, Balance>> winners;
    for (const auto& [voter, stake, choice] : tally.reveals)
        if (choice == winning_side) winners.emplace_back(voter, stake);
    std::sort(winners.begin(), winners.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    unsigned __int128 total_stake = 0;
    for (const auto& w : winners) total_stake += w.second;
    if (total_stake == 0) {
        r.returned_to_loser = rest;
        return r;
    }
    Balance paid = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < winners.size(); ++i) {
        Balance share = static_cast<Balance>(
            static_cast<unsigned __int128>(rest) * winners[i].second / total_stake);
        r.voter_rewards.push_back({winners[i].first, share});
        paid += share;
        if (winners[i].second > winners[largest].second) largest = i;
    }
    r.voter_rewards[largest].amount += rest - paid;
    return r;
}

Hash32 Engine::vote_commitment(VoteChoice choice, const Hash32& salt, std::uint64_t poll) {
    std::string buf;
    buf.push_back(choice == VoteChoice::For ? '\x01' : '\x00');
    buf.append(reinterpret_cast<const char*>(salt.data()), salt.size());
    buf += std::to_string(poll);
    return crypto::sha256(buf);
}

PollTally Engine::tally_of(const PollState& p) const {
    PollTally t;
    t.applicant_deposit = p.applicant_deposit;
    t.challenger_deposit = p.challenger_deposit;
    t.quorum_pct = config_.tcr.vote_quorum_pct;
    t.dispensation_pct = config_.tcr.dispensation_pct;
    for (const auto& [voter, reveal] : p.reveals)
        t.reveals.emplace_back(voter, p.commits.at(voter).stake, reveal.choice);
    return t;
}

// --- status ----------------------------------------------------------------

CuratedStatus Engine::curated_status(TokenId token) const {
    if (is_system_token(token) || tokens_.count(token) == 0) return CuratedStatus::NotListed;
    if (auto pr = proceedings_.find(token); pr != proceedings_.end()) {
        if (pr->second.poll) return CuratedStatus::Challenged;
        // a pending removal does not suspend the listing
        return pr->second.kind == ProceedingKind::Add ? CuratedStatus::Applied
                                                      : CuratedStatus::Listed;
    }
    return registry_.count(token) ? CuratedStatus::Listed : CuratedStatus::NotListed;
}

void Engine::refresh_curated_status(TokenId token) {
    if (TokenState* t = token_mut(token)) t->record.curated_status = curated_status(token);
}

const PollState* Engine::find_poll(std::uint64_t poll) const {
    auto it = polls_.find(poll);
    return it == polls_.end() ? nullptr : &it->second;
}

// --- applications ----------------------------------------------------------

Result<void> Engine::apply_listing(const AccountId& applicant, TokenId token, ListingKind kind) {
    if (is_system_token(token) || tokens_.count(token) == 0)
        return {Errc::UnknownToken, std::to_string(token)};
    if (proceedings_.count(token)) return {Errc::ListingExists, {}};
    bool listed = registry_.count(token) != 0;
    if (kind == ListingKind::AddToList && listed) return {Errc::WrongKind, "already listed"};
    if (kind == ListingKind::RemoveFromList && !listed) return {Errc::WrongKind, "not listed"};
    Balance deposit = config_.tcr.min_deposit;
    if (auto c = check_gov_lock(applicant, deposit); !c.ok()) return c;
    auto deadline = checked_add(clock_, config_.tcr.apply_stage_ticks);
    if (!deadline) return {Errc::Overflow, "deadline"};
    emit(ListingApplied{token, kind, applicant, deposit, *deadline});
    return {};
}

Result<void> Engine::apply(const ListingApplied& e) {
    if (is_system_token(e.token) || tokens_.count(e.token) == 0)
        return {Errc::UnknownToken, std::to_string(e.token)};
    if (proceedings_.count(e.token)) return {Errc::ListingExists, {}};
    bool listed = registry_.count(e.token) != 0;
    if (e.kind == ListingKind::AddToList && listed) return {Errc::WrongKind, {}};
    if (e.kind == ListingKind::RemoveFromList && !listed) return {Errc::WrongKind, {}};
    if (e.deposit != config_.tcr.min_deposit) return corrupt("application deposit mismatch");
    auto deadline = checked_add(clock_, config_.tcr.apply_stage_ticks);
    if (!deadline || e.deadline != *deadline) return corrupt("application deadline mismatch");
    if (auto c = check_gov_lock(e.applicant, e.deposit); !c.ok()) return c;
    gov_lock(e.applicant, e.deposit);
    Proceeding pr;
    pr.kind = e.kind == ListingKind::AddToList ? ProceedingKind::Add : ProceedingKind::Remove;
    pr.proposer = e.applicant;
    pr.deposit = e.deposit;
    pr.deadline = e.deadline;
    proceedings_.emplace(e.token, std::move(pr));
    refresh_curated_status(e.token);
    return {};
}

// --- challenges ------------------------------------------------------------

Result<std::uint64_t> Engine::challenge(const AccountId& challenger, TokenId token) {
    if (is_system_token(token) || tokens_.count(token) == 0)
        return {Errc::UnknownToken, std::to_string(token)};
    if (auto pr = proceedings_.find(token); pr != proceedings_.end()) {
        if (pr->second.poll) return {Errc::AlreadyChallenged, {}};
        if (clock_ >= pr->second.deadline)
            return {Errc::NoActiveListing, "challenge window closed"};
    } else if (registry_.count(token) == 0) {
        return {Errc::NoActiveListing, {}};
    }
    Balance deposit = config_.tcr.min_deposit;
    if (auto c = check_gov_lock(challenger, deposit); !c.ok()) return c.error();
    auto commit_deadline = checked_add(clock_, config_.tcr.commit_stage_ticks);
    if (!commit_deadline) return {Errc::Overflow, "commit deadline"};
    auto reveal_deadline = checked_add(*commit_deadline, config_.tcr.reveal_stage_ticks);
    if (!reveal_deadline) return {Errc::Overflow, "reveal deadline"};
    std::uint64_t id = next_poll_id_;
    emit(ChallengeOpened{token, challenger, deposit, id, *commit_deadline, *reveal_deadline});
    return id;
}

Result<void> Engine::apply(const ChallengeOpened& e) {
    if (is_system_token(e.token) || tokens_.count(e.token) == 0)
        return {Errc::UnknownToken, std::to_string(e.token)};
    if (e.poll != next_poll_id_) return corrupt("poll id out of sequence");
    if (e.deposit != config_.tcr.min_deposit) return corrupt("challenge deposit mismatch");
    auto commit_deadline = checked_add(clock_, config_.tcr.commit_stage_ticks);
    if (!commit_deadline || e.commit_deadline != *commit_deadline)
        return corrupt("commit deadline mismatch");
    auto reveal_deadline = checked_add(*commit_deadline, config_.tcr.reveal_stage_ticks);
    if (!reveal_deadline || e.reveal_deadline != *reveal_deadline)
        return corrupt("reveal deadline mismatch");
    if (auto c = check_gov_lock(e.challenger, e.deposit); !c.ok()) return c;

    ProceedingKind kind;
    AccountId applicant;
    Balance applicant_deposit = 0;
    if (auto pr = proceedings_.find(e.token); pr != proceedings_.end()) {
        if (pr->second.poll) return {Errc::AlreadyChallenged, {}};
        if (clock_ >= pr->second.deadline) return {Errc::NoActiveListing, {}};
        kind = pr->second.kind;
        applicant = pr->second.proposer;
        applicant_deposit = pr->second.deposit;
        pr->second.poll = e.poll;
    } else {
        auto owner = registry_.find(e.token);
        if (owner == registry_.end()) return {Errc::NoActiveListing, {}};
        kind = ProceedingKind::Defense;
        applicant = owner->second;
        Proceeding defense;
        defense.kind = ProceedingKind::Defense;
        defense.proposer = applicant;
        defense.deposit = 0;  // the listing itself is the champion's stake
        defense.deadline = clock_;
        defense.poll = e.poll;
        proceedings_.emplace(e.token, std::move(defense));
    }
    gov_lock(e.challenger, e.deposit);
    PollState p;
    p.id = e.poll;
    p.token = e.token;
    p.kind = kind;
    p.applicant = applicant;
    p.applicant_deposit = applicant_deposit;
    p.challenger = e.challenger;
    p.challenger_deposit = e.deposit;
    p.commit_deadline = e.commit_deadline;
    p.reveal_deadline = e.reveal_deadline;
    polls_.emplace(e.poll, std::move(p));
    ++next_poll_id_;
    refresh_curated_status(e.token);
    return {};
}

// --- unchallenged settlement ------------------------------------------------

Result<void> Engine::update_listing(TokenId token) {
    auto pr = proceedings_.find(token);
    if (pr == proceedings_.end()) return {Errc::NoActiveListing, {}};
    if (pr->second.poll) return {Errc::AlreadyChallenged, {}};
    if (clock_ < pr->second.deadline)
        return {Errc::DeadlineNotReached,
                std::to_string(pr->second.deadline - clock_) + " ticks remain"};
    emit(ListingFinalized{token, pr->second.kind == ProceedingKind::Add});
    return {};
}

Result<void> Engine::apply(const ListingFinalized& e) {
    auto it = proceedings_.find(e.token);
    if (it == proceedings_.end()) return corrupt("no proceeding to finalize");
    const Proceeding& pr = it->second;
    if (!pr.poll) {
        if (clock_ < pr.deadline) return {Errc::DeadlineNotReached, {}};
        if (e.listed != (pr.kind == ProceedingKind::Add)) return corrupt("listing flag mismatch");
        gov_unlock(pr.proposer, pr.deposit);
        if (pr.kind == ProceedingKind::Add)
            registry_[e.token] = pr.proposer;
        else
            registry_.erase(e.token);
    } else {
        const PollState& poll = polls_.at(*pr.poll);
        if (!poll.outcome) return corrupt("poll unresolved");
        bool listing_won = *poll.outcome == PollOutcome::ListingWins;
        bool expect = pr.kind == ProceedingKind::Remove ? !listing_won : listing_won;
        if (e.listed != expect) return corrupt("listing flag mismatch");
        if (e.listed) {
            if (registry_.count(e.token) == 0) registry_[e.token] = poll.applicant;
        } else {
            registry_.erase(e.token);
        }
    }
    proceedings_.erase(it);
    refresh_curated_status(e.token);
    return {};
}

// --- voting ----------------------------------------------------------------

Result<void> Engine::commit_vote(const AccountId& voter, std::uint64_t poll,
                                 const Hash32& commit_hash, Balance stake) {
    auto it = polls_.find(poll);
    if (it == polls_.end()) return {Errc::UnknownPoll, std::to_string(poll)};
    const PollState& p = it->second;
    if (clock_ >= p.commit_deadline) return {Errc::CommitClosed, {}};
    if (p.commits.count(voter)) return {Errc::DuplicateCommit, {}};
    if (stake == 0) return {Errc::ZeroStake, {}};
    if (auto c = check_gov_lock(voter, stake); !c.ok()) return c;
    emit(VoteCommitted{poll, voter, commit_hash, stake});
    return {};
}

Result<void> Engine::apply(const VoteCommitted& e) {
    auto it = polls_.find(e.poll);
    if (it == polls_.end()) return {Errc::UnknownPoll, {}};
    PollState& p = it->second;
    if (clock_ >= p.commit_deadline) return {Errc::CommitClosed, {}};
    if (p.commits.count(e.voter)) return {Errc::DuplicateCommit, {}};
    if (e.stake == 0) return {Errc::ZeroStake, {}};
    if (auto c = check_gov_lock(e.voter, e.stake); !c.ok()) return c;
    gov_lock(e.voter, e.stake);
    p.commits.emplace(e.voter, CommitInfo{e.commit_hash, e.stake});
    return {};
}

Result<void> Engine::reveal_vote(const AccountId& voter, std::uint64_t poll, VoteChoice choice,
                                 const Hash32& salt) {
    auto it = polls_.find(poll);
    if (it == polls_.end()) return {Errc::UnknownPoll, std::to_string(poll)};
    const PollState& p = it->second;
    if (clock_ < p.commit_deadline) return {Errc::RevealTooEarly, {}};
    if (clock_ >= p.reveal_deadline) return {Errc::RevealClosed, {}};
    auto cm = p.commits.find(voter);
    if (cm == p.commits.end()) return {Errc::NoCommit, {}};
    if (p.reveals.count(voter)) return {Errc::DuplicateReveal, {}};
    if (vote_commitment(choice, salt, poll) != cm->second.commit_hash)
        return {Errc::HashMismatch, {}};
    emit(VoteRevealed{poll, voter, choice, salt});
    return {};
}

Result<void> Engine::apply(const VoteRevealed& e) {
    auto it = polls_.find(e.poll);
    if (it == polls_.end()) return {Errc::UnknownPoll, {}};
    PollState& p = it->second;
    if (clock_ < p.commit_deadline) return {Errc::RevealTooEarly, {}};
    if (clock_ >= p.reveal_deadline) return {Errc::RevealClosed, {}};
    auto cm = p.commits.find(e.voter);
    if (cm == p.commits.end()) return {Errc::NoCommit, {}};
    if (p.reveals.count(e.voter)) return {Errc::DuplicateReveal, {}};
    if (vote_commitment(e.choice, e.salt, e.poll) != cm->second.commit_hash)
        return {Errc::HashMismatch, {}};
    p.reveals.emplace(e.voter, RevealInfo{e.choice, e.salt});
    return {};
}

// --- resolution ------------------------------------------------------------

Result<PollOutcome> Engine::resolve_poll(std::uint64_t poll) {
    auto it = polls_.find(poll);
    if (it == polls_.end()) return {Errc::UnknownPoll, std::to_string(poll)};
    const PollState& p = it->second;
    if (p.outcome) return {Errc::AlreadyResolved, {}};
    if (clock_ < p.reveal_deadline)
        return {Errc::PollNotEnded, std::to_string(p.reveal_deadline - clock_) + " ticks remain"};

    PollResolution res = resolve_tally(tally_of(p));
    AccountId loser = res.outcome == PollOutcome::ListingWins ? p.challenger : p.applicant;
    Balance outflow = res.party_cut;
    for (const auto& r : res.voter_rewards) outflow += r.amount;

    Balance unlock_total = 0;
    if (loser == p.applicant) unlock_total += p.applicant_deposit;
    if (loser == p.challenger) unlock_total += p.challenger_deposit;
    if (auto cm = p.commits.find(loser); cm != p.commits.end()) unlock_total += cm->second.stake;
    Balance locked_after = locked_gov(loser) - unlock_total;
    auto plan = plan_seizure(loser, outflow, locked_after);

    emit(PollResolved{poll, res.outcome, res.party_cut, res.voter_rewards, std::move(plan)});
    const Proceeding& pr = proceedings_.at(p.token);
    bool listing_won = res.outcome == PollOutcome::ListingWins;
    emit(ListingFinalized{p.token,
                          pr.kind == ProceedingKind::Remove ? !listing_won : listing_won});
    return res.outcome;
}

Result<void> Engine::apply(const PollResolved& e) {
    auto it = polls_.find(e.poll);
    if (it == polls_.end()) return {Errc::UnknownPoll, {}};
    PollState& p = it->second;
    if (p.outcome) return {Errc::AlreadyResolved, {}};
    if (clock_ < p.reveal_deadline) return {Errc::PollNotEnded, {}};
    auto pr = proceedings_.find(p.token);
    if (pr == proceedings_.end() || pr->second.poll != e.poll)
        return corrupt("poll detached from proceeding");

    PollResolution res = resolve_tally(tally_of(p));
    if (res.outcome != e.outcome || res.party_cut != e.party_cut ||
        !same_payouts(res.voter_rewards, e.voter_rewards))
        return corrupt("poll resolution mismatch");

    for (const auto& [voter, commit] : p.commits) gov_unlock(voter, commit.stake);
    if (p.applicant_deposit) gov_unlock(p.applicant, p.applicant_deposit);
    if (p.challenger_deposit) gov_unlock(p.challenger, p.challenger_deposit);

    AccountId winner = e.outcome == PollOutcome::ListingWins ? p.applicant : p.challenger;
    AccountId loser = e.outcome == PollOutcome::ListingWins ? p.challenger : p.applicant;
    Balance outflow = e.party_cut;
    for (const auto& r : e.voter_rewards) outflow += r.amount;
    auto plan = plan_seizure(loser, outflow, locked_gov(loser));
    if (!same_payouts(plan, e.seized_delegations)) return corrupt("seizure plan mismatch");

    Balance planned = 0;
    for (const auto& s : plan) planned += s.amount;
    {
        Balance owned = gov_of(loser);
        Balance out = 0;
        Balance locked = locked_gov(loser);
        if (auto g = gov_.find(loser); g != gov_.end()) out = g->second.out_total();
        Balance free_units = owned - out;
        free_units = free_units > locked ? free_units - locked : 0;
        if (planned > outflow || free_units + planned < outflow)
            return corrupt("seizure infeasible");
    }
    gov_seize(loser, outflow, plan);

    TokenState& gov = *token_mut(kGovTokenId);
    credit(gov, winner, e.party_cut);
    for (const auto& r : e.voter_rewards) credit(gov, r.account, r.amount);

    p.outcome = e.outcome;
    refresh_curated_status(p.token);
    return {};
}

}  // namespace patlab
