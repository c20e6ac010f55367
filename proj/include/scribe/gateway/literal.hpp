#pragma once

#include <string>

#include "scribe/metrics/triple.hpp"

namespace scribe::gateway {

// Parses the first bracketed list-of-lists-of-strings in the response using a
// restricted grammar (string literals, commas, brackets only -- never any
// form of evaluation). Inner lists that are not length 3 are dropped; a
// warning per drop is appended to `warnings` when provided.
// Throws NoLiteralFound when no such literal exists.
TripleList parse_triples_literal(const std::string& response,
                                 std::vector<std::string>* warnings = nullptr);

} // namespace scribe::gateway
