#include "scicheck/csv.hpp"

#include "scicheck/error.hpp"

#include <map>
#include <optional>
#include <tuple>

namespace scicheck {

std::vector<CsvRecord> read_csv(std::string_view in) {
    std::vector<CsvRecord> records;
    CsvRecord rec{1, {}};
    std::string field;
    std::size_t line = 1;
    bool in_quotes = false;
    bool any = false;  // current record has content

    auto end_field = [&] {
        rec.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        if (any) records.push_back(std::move(rec));
        rec = CsvRecord{line, {}};
        any = false;
    };

    for (std::size_t i = 0; i < in.size(); ++i) {
        const char c = in[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < in.size() && in[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                any = true;
                break;
            case ',':
                end_field();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                end_record();
                break;
            default:
                field += c;
                any = true;
        }
    }
    if (in_quotes) throw ParseError(rec.line, "unterminated quoted field");
    end_record();
    return records;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvIngestResult ingest_csv(std::string_view input, const MediaId& default_provenance) {
    CsvIngestResult result;
    std::vector<CsvRecord> records = read_csv(input);
    if (records.empty()) throw ValidationError("subject", "missing required column (no header row)");

    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < records[0].fields.size(); ++i) {
        columns.try_emplace(normalize_text(records[0].fields[i]), i);
    }
    auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        auto it = columns.find(name);
        if (it != columns.end()) return it->second;
        if (required) throw ValidationError(name, "missing required column");
        return std::nullopt;
    };
    const std::size_t cs = *column("subject", true);
    const std::size_t cp = *column("predicate", true);
    const std::size_t co = *column("object", true);
    const std::optional<std::size_t> csrc = column("source", false);

    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const CsvRecord& rec = records[r];
        ++result.rows;
        auto cell = [&](std::size_t idx) -> std::string_view {
            return idx < rec.fields.size() ? std::string_view(rec.fields[idx]) : std::string_view{};
        };
        try {
            Triple t(Term(cell(cs), TermKind::Entity, "subject"),
                     Term(cell(cp), TermKind::Predicate, "predicate"),
                     Term(cell(co), TermKind::Entity, "object"));
            std::string source = csrc ? collapse_whitespace(cell(*csrc)) : std::string{};
            t.provenance.insert(source.empty() ? default_provenance : source);

            auto key = std::make_tuple(t.subject.text(), t.predicate.text(), t.object.text());
            auto [it, inserted] = seen.try_emplace(std::move(key), result.triples.size());
            if (inserted) {
                result.triples.push_back(std::move(t));
            } else {
                ++result.duplicates;
                result.triples[it->second].provenance.insert(t.provenance.begin(), t.provenance.end());
            }
        } catch (const ValidationError& e) {
            result.errors.push_back({rec.line, std::string("empty cell in column ") + e.field()});
        }
    }
    return result;
}

std::string serialize_csv(const std::vector<Triple>& triples) {
    std::string out = "subject,predicate,object,source\n";
    for (const Triple& t : triples) {
        const std::string prefix = csv_escape(t.subject.text()) + ',' +
                                   csv_escape(t.predicate.text()) + ',' +
                                   csv_escape(t.object.text()) + ',';
        if (t.provenance.empty()) out += prefix + '\n';
        for (const MediaId& m : t.provenance) out += prefix + csv_escape(m) + '\n';
    }
    return out;
}

}  // namespace scicheck
