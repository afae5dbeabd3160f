#include "scicheck/ntriples.hpp"

#include "scicheck/error.hpp"

#include <cctype>
#include <cstdint>

namespace scicheck {

namespace {

constexpr std::string_view kEntityBase = "urn:scicheck:entity/";
constexpr std::string_view kPredicateBase = "urn:scicheck:predicate/";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class LineParser {
public:
    LineParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(line_no_, what + " (column " + std::to_string(pos_ + 1) + ")");
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }

    std::string label_from_iri() {
        if (peek() != '<') fail("expected '<'");
        ++pos_;
        const std::size_t start = pos_;
        while (!at_end() && s_[pos_] != '>') {
            if (s_[pos_] == ' ' || s_[pos_] == '<' || s_[pos_] == '"') fail("invalid character in IRI");
            ++pos_;
        }
        if (at_end()) fail("unterminated IRI");
        std::string_view iri = s_.substr(start, pos_ - start);
        ++pos_;
        while (!iri.empty() && (iri.back() == '/' || iri.back() == '#')) iri.remove_suffix(1);
        const std::size_t cut = iri.find_last_of("/#");
        std::string_view segment = cut == std::string_view::npos ? iri : iri.substr(cut + 1);
        if (segment.empty()) fail("IRI has no label segment");
        return decode_segment(segment);
    }

    std::string literal() {
        ++pos_;  // opening quote
        std::string out;
        while (true) {
            if (at_end()) fail("unterminated literal");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (at_end()) fail("dangling escape");
            const char e = s_[pos_++];
            switch (e) {
                case 't': out += '\t'; break;
                case 'n': out += '\n'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\'': out += '\''; break;
                case '\\': out += '\\'; break;
                case 'u': append_utf8(out, hex_escape(4)); break;
                case 'U': append_utf8(out, hex_escape(8)); break;
                default: fail(std::string("unknown escape \\") + e);
            }
        }
        if (peek() == '^' || peek() == '@') fail("datatypes and language tags are not supported");
        return out;
    }

    Triple parse() {
        skip_ws();
        if (peek() == '_') fail("blank nodes are not supported");
        std::string s = label_from_iri();
        skip_ws();
        std::string p = label_from_iri();
        skip_ws();
        std::string o;
        if (peek() == '"') {
            o = literal();
        } else if (peek() == '<') {
            o = label_from_iri();
        } else {
            fail("expected IRI or literal object");
        }
        skip_ws();
        if (peek() != '.') fail("expected '.'");
        ++pos_;
        skip_ws();
        if (!at_end() && peek() != '#') fail("trailing content after '.'");
        try {
            return Triple(Term(s, TermKind::Entity, "subject"), Term(p, TermKind::Predicate, "predicate"),
                          Term(o, TermKind::Entity, "object"));
        } catch (const ValidationError& e) {
            throw ParseError(line_no_, e.what());
        }
    }

private:
    std::uint32_t hex_escape(int digits) {
        std::uint32_t cp = 0;
        for (int i = 0; i < digits; ++i) {
            const int v = at_end() ? -1 : hex_value(s_[pos_]);
            if (v < 0) fail("bad unicode escape");
            cp = cp * 16 + static_cast<std::uint32_t>(v);
            ++pos_;
        }
        return cp;
    }

    std::string decode_segment(std::string_view seg) {
        std::string out;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            if (seg[i] == '%') {
                const int hi = i + 1 < seg.size() ? hex_value(seg[i + 1]) : -1;
                const int lo = i + 2 < seg.size() ? hex_value(seg[i + 2]) : -1;
                if (hi < 0 || lo < 0) fail("bad percent escape in IRI");
                out += static_cast<char>(hi * 16 + lo);
                i += 2;
            } else if (seg[i] == '_') {
                out += ' ';
            } else {
                out += seg[i];
            }
        }
        return out;
    }

    std::string_view s_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<Triple> parse_ntriples(std::string_view input) {
    std::vector<Triple> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= input.size()) {
        std::size_t end = input.find('\n', start);
        if (end == std::string_view::npos) end = input.size();
        std::string_view line = input.substr(start, end - start);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::size_t first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line[first] != '#') {
            out.push_back(LineParser(line, line_no).parse());
        }
        if (end == input.size()) break;
        start = end + 1;
    }
    return out;
}

std::string encode_segment(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

std::string serialize_ntriples(const std::vector<Triple>& triples) {
    std::string out;
    for (const Triple& t : triples) {
        out += '<';
        out += kEntityBase;
        out += encode_segment(t.subject.text());
        out += "> <";
        out += kPredicateBase;
        out += encode_segment(t.predicate.text());
        out += "> <";
        out += kEntityBase;
        out += encode_segment(t.object.text());
        out += "> .\n";
    }
    return out;
}

}  // namespace scicheck
