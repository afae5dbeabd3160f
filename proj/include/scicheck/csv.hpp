#pragma once

#include "scicheck/triple.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

struct CsvRecord {
    std::size_t line;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

// RFC 4180 reader: comma separated, double-quote escaping, quoted fields may
// span lines. Throws ParseError on an unterminated quote.
std::vector<CsvRecord> read_csv(std::string_view input);

std::string csv_escape(std::string_view field);

struct RowError {
    std::size_t line;
    std::string message;
};

struct CsvIngestResult {
    std::vector<Triple> triples;   // deduplicated, first-seen order
    std::size_t rows = 0;          // data rows read (excluding header)
    std::size_t duplicates = 0;    // rows merged into an earlier row
    std::vector<RowError> errors;  // rows skipped
};

// Ground-truth CSV with header `subject,predicate,object[,source]` (any
// column order, case-insensitive, extra columns ignored). A missing required
// column throws ValidationError naming it; bad rows are reported and skipped.
CsvIngestResult ingest_csv(std::string_view input, const MediaId& default_provenance);

// Header plus one row per (triple, provenance id); ingest_csv inverts it.
std::string serialize_csv(const std::vector<Triple>& triples);

}  // namespace scicheck
