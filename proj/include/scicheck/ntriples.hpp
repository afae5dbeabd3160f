#pragma once

#include "scicheck/triple.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

// Parses the supported N-Triples subset: `<IRI> <IRI> (<IRI>|"literal") .`
// per line, blank lines and `#` comments skipped. IRIs are reduced to their
// last path segment (after the final `/` or `#`), percent-decoded, with `_`
// read as a space, then normalized. Throws ParseError on the first malformed
// line; nothing is returned in that case.
std::vector<Triple> parse_ntriples(std::string_view input);

// Writes one line per triple using `urn:scicheck:` IRIs whose last segment
// encodes the term text; parse_ntriples inverts this exactly.
std::string serialize_ntriples(const std::vector<Triple>& triples);

// Encodes a term as an IRI path segment (unreserved ASCII kept, rest %XX).
std::string encode_segment(std::string_view text);

}  // namespace scicheck
