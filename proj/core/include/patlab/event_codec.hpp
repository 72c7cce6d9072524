#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "patlab/errors.hpp"
#include "patlab/events.hpp"

namespace patlab {

// Canonical form, pinned: compact JSON, no whitespace, object keys in field
// declaration order, integers base-10, byte arrays lowercase hex, variant tag
// first as "type":"<Name>". Log lines are
//   {"seq":N,"prev_hash":"<64 hex>","time":T,"event":{...},"hash":"<64 hex>"}
// and hash = SHA-256(prev_hash_hex || event_json || decimal(seq)).

std::string canonical_json(const Event& event);
std::string canonical_json(const TokenDesign& design);
std::string canonical_json(const EngineConfig& config);
std::string canonical_json(const Attestation& att);

Hash32 record_hash(const Hash32& prev_hash, std::string_view event_json, std::uint64_t seq);

std::string record_line(const EventRecord& record);  // no trailing newline

Result<EventRecord> parse_record_line(std::string_view line);
Result<TokenDesign> parse_token_design(std::string_view json_text);
Result<EngineConfig> parse_engine_config(std::string_view json_text);
Result<Attestation> parse_attestation(std::string_view json_text);

struct LogVerifyResult {
    bool ok = true;
    std::uint64_t first_bad_seq = 0;  // record position, 0-based
    std::string reason;
};

/// Hash chain, seq contiguity, and clock consistency over parsed records.
LogVerifyResult verify_records(const std::vector<EventRecord>& records);

/// Full audit of log text: strict parse, byte-exact canonical form per line,
/// then everything verify_records checks. Any single-bit flip in the text
/// fails at or before the mutated record.
LogVerifyResult verify_log_text(std::string_view text);

/// Parse every line; no verification. Positions in errors are line indices.
Result<std::vector<EventRecord>> parse_log_text(std::string_view text);

std::string render_log_text(const std::vector<EventRecord>& records);

std::string_view errc_name(Errc code);

}  // namespace patlab
