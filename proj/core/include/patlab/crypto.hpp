#pragma once

#include <cstdint>
#include <string_view>

#include "patlab/types.hpp"

namespace patlab::crypto {

Hash32 sha256(std::string_view data);
Hash32 sha256(const std::uint8_t* data, std::size_t len);

/// Ed25519 oracle keys: 32-byte public verification key, 64-byte
/// detached signature over the canonical payload bytes.
struct OracleKeypair {
    Hash32 public_key{};
    std::array<std::uint8_t, 64> secret_key{};
};

/// Deterministic keypair from a 32-byte seed (simulation oracles derive
/// their seeds from the scenario seed).
OracleKeypair keypair_from_seed(const Hash32& seed);

Signature sign(const OracleKeypair& kp, std::string_view message);
bool verify(const Hash32& public_key, std::string_view message, const Signature& sig);

}  // namespace patlab::crypto
