#include "patlab/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace patlab {

namespace {
void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    });
}
}  // namespace

std::string to_hex(const std::uint8_t* data, std::size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.resize(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out[2 * i] = digits[data[i] >> 4];
        out[2 * i + 1] = digits[data[i] & 0xf];
    }
    return out;
}

std::optional<std::string> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;  // uppercase rejected: rendered form is lowercase everywhere
    };
    std::string out;
    out.resize(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out[i] = static_cast<char>((hi << 4) | lo);
    }
    return out;
}

std::string AccountId::hex() const { return to_hex(bytes.data(), bytes.size()); }

std::optional<AccountId> AccountId::from_hex(std::string_view hex) {
    auto arr = array_from_hex<32>(hex);
    if (!arr) return std::nullopt;
    return AccountId{*arr};
}

AccountId AccountId::from_index(std::uint64_t n) {
    AccountId a{};
    for (int i = 0; i < 8; ++i)
        a.bytes[31 - i] = static_cast<std::uint8_t>((n >> (8 * i)) & 0xff);
    return a;
}

std::optional<std::uint64_t> checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
    return r;
}

std::optional<std::uint64_t> checked_sub(std::uint64_t a, std::uint64_t b) {
    if (b > a) return std::nullopt;
    return a - b;
}

std::optional<std::uint64_t> checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
    return r;
}

std::optional<std::uint64_t> muldiv_floor(std::uint64_t a, std::uint64_t b,
                                          std::uint64_t d) {
    if (d == 0) return std::nullopt;
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    unsigned __int128 q = p / d;
    if (q > 0xffffffffffffffffULL) return std::nullopt;
    return static_cast<std::uint64_t>(q);
}

namespace crypto {

Hash32 sha256(const std::uint8_t* data, std::size_t len) {
    ensure_sodium();
    Hash32 out{};
    crypto_hash_sha256(out.data(), data, len);
    return out;
}

Hash32 sha256(std::string_view data) {
    return sha256(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
}

OracleKeypair keypair_from_seed(const Hash32& seed) {
    ensure_sodium();
    OracleKeypair kp;
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
    return kp;
}

Signature sign(const OracleKeypair& kp, std::string_view message) {
    ensure_sodium();
    Signature sig{};
    crypto_sign_detached(sig.data(), nullptr,
                         reinterpret_cast<const unsigned char*>(message.data()),
                         message.size(), kp.secret_key.data());
    return sig;
}

bool verify(const Hash32& public_key, std::string_view message, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(
               sig.data(), reinterpret_cast<const unsigned char*>(message.data()),
               message.size(), public_key.data()) == 0;
}

}  // namespace crypto
}  // namespace patlab
