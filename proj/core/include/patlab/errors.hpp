#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace patlab {

enum class Errc : std::uint32_t {
    // ledger
    UnknownToken,
    NonTransferable,
    NotBurnable,
    InsufficientBalance,
    SupplyCapExceeded,
    ZeroTicks,
    Overflow,
    // token factory
    InvalidDesign,
    // claims
    TokenNotClaimable,
    UnknownClaim,
    ClaimClosed,
    IndexOutOfRange,
    PayloadMismatch,
    BadOracleSignature,
    UnauthorizedAttestor,
    DuplicateAttestation,
    NotAllApproved,
    // tcr
    InsufficientGov,
    ListingExists,
    WrongKind,
    NoActiveListing,
    AlreadyChallenged,
    DeadlineNotReached,
    CommitClosed,
    DuplicateCommit,
    ZeroStake,
    RevealClosed,
    RevealTooEarly,
    HashMismatch,
    NoCommit,
    DuplicateReveal,
    PollNotEnded,
    AlreadyResolved,
    UnknownPoll,
    // reputation / governance
    NoSuchDelegation,
    DelegationLocked,
    // value backing
    NoSwapPool,
    EmptyPool,
    NoMintConversion,
    NoCoupledBurn,
    InsufficientCoupledBalance,
    // log / config
    CorruptLog,
    InvalidConfig,
};

std::string_view errc_name(Errc c);

struct Error {
    Errc code;
    std::string detail;
};

/// Minimal expected-style result. Domain errors are normal control flow
/// here (the simulation drives the engine with attempts that may fail),
/// so they travel as values, not exceptions.
template <class T>
class Result {
  public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error err) : v_(std::move(err)) {}
    Result(Errc code, std::string detail = {}) : v_(Error{code, std::move(detail)}) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T& value() & { return std::get<T>(v_); }
    T&& value() && { return std::get<T>(std::move(v_)); }

    const Error& error() const { return std::get<Error>(v_); }
    Errc code() const { return error().code; }

  private:
    std::variant<T, Error> v_;
};

struct Unit {};

template <>
class Result<void> {
  public:
    Result() = default;
    Result(Error err) : err_(std::move(err)), ok_(false) {}
    Result(Errc code, std::string detail = {})
        : err_(Error{code, std::move(detail)}), ok_(false) {}

    bool ok() const { return ok_; }
    explicit operator bool() const { return ok_; }
    const Error& error() const { return err_; }
    Errc code() const { return err_.code; }

  private:
    Error err_{};
    bool ok_ = true;
};

}  // namespace patlab
