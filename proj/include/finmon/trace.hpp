#pragma once

#include <cstdint>
#include <string>

#include "finmon/construction.hpp"

namespace finmon {

// Canonical JSON document describing the first `steps` schedule steps of the
// given run: {enumeration_rule, format_version, p, schedule_rule, steps:
// [{action, candidate, i, w, watermark}]} with keys in sorted order and ids
// rendered as decimal strings (they outgrow machine words). Advances the
// state as needed; the state's log limit must cover `steps`.
std::string build_trace(ConstructionState& st, uint64_t steps);

// Hex SHA-256 of a byte string; the regression value for a trace prefix.
std::string sha256_hex(const std::string& bytes);

}  // namespace finmon
