#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace patlab {

/// 32-byte opaque account identifier. Any byte pattern is a valid account;
/// no registration step exists anywhere in the engine.
struct AccountId {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const AccountId&) const = default;

    std::string hex() const;
    static std::optional<AccountId> from_hex(std::string_view hex);

    /// Account with the low 8 bytes set to `n`, big-endian. Used for
    /// synthetic actors (simulation agents, custody accounts derive
    /// differently, see backing).
    static AccountId from_index(std::uint64_t n);
};

using TokenId = std::uint64_t;
using Balance = std::uint64_t;
using Tick = std::uint64_t;

/// User-created tokens take sequential ids from 0. The two built-in
/// ledgers live at the top of the id space and never collide with them.
inline constexpr TokenId kRepTokenId = 0xffffffffffffffffULL;
inline constexpr TokenId kGovTokenId = 0xfffffffffffffffeULL;
inline constexpr TokenId kMaxUserTokenId = 0xfffffffffffffff0ULL;

inline bool is_system_token(TokenId id) { return id > kMaxUserTokenId; }

/// Overflow-checked arithmetic. The ledger rejects overflow instead of
/// wrapping; a silent wrap would corrupt the conservation invariants.
std::optional<std::uint64_t> checked_add(std::uint64_t a, std::uint64_t b);
std::optional<std::uint64_t> checked_sub(std::uint64_t a, std::uint64_t b);
std::optional<std::uint64_t> checked_mul(std::uint64_t a, std::uint64_t b);

/// floor(a * b / d), exact in 128-bit intermediate; nullopt if the result
/// does not fit u64 or d == 0.
std::optional<std::uint64_t> muldiv_floor(std::uint64_t a, std::uint64_t b,
                                          std::uint64_t d);

std::string to_hex(const std::uint8_t* data, std::size_t len);
std::optional<std::string> from_hex(std::string_view hex);  // raw bytes out

template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& a) {
    return to_hex(a.data(), N);
}

template <std::size_t N>
std::optional<std::array<std::uint8_t, N>> array_from_hex(std::string_view hex) {
    if (hex.size() != 2 * N) return std::nullopt;
    auto raw = from_hex(hex);
    if (!raw) return std::nullopt;
    std::array<std::uint8_t, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<std::uint8_t>((*raw)[i]);
    return out;
}

using Hash32 = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;

}  // namespace patlab
