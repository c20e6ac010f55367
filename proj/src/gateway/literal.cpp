#include "scribe/gateway/literal.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "scribe/errors.hpp"

namespace scribe::gateway {

namespace {

// Restricted literal grammar over a candidate region:
//   outer  := '[' ws (inner (ws ',' ws inner)* ws ','? )? ws ']'
//   inner  := '[' ws (string (ws ',' ws string)* ws ','? )? ws ']'
//   string := '"' chars '"' | '\'' chars '\''
// Nothing else is admitted; in particular no identifiers, calls, numbers, or
// attribute access, so the parser can never evaluate anything.
struct LiteralParser {
    const std::string& text;
    std::size_t pos;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
    }

    std::optional<std::string> parse_string() {
        if (pos >= text.size() || (text[pos] != '"' && text[pos] != '\'')) return std::nullopt;
        const char quote = text[pos++];
        std::string out;
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '\\' && pos + 1 < text.size()) {
                char esc = text[pos + 1];
                switch (esc) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '\\': out += '\\'; break;
                    case '\'': out += '\''; break;
                    case '"': out += '"'; break;
                    default: out += esc;
                }
                pos += 2;
                continue;
            }
            if (c == quote) {
                pos++;
                return out;
            }
            out += c;
            pos++;
        }
        return std::nullopt; // unterminated
    }

    std::optional<std::vector<std::string>> parse_inner() {
        if (pos >= text.size() || text[pos] != '[') return std::nullopt;
        pos++;
        std::vector<std::string> items;
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
            pos++;
            return items;
        }
        while (true) {
            skip_ws();
            auto s = parse_string();
            if (!s) return std::nullopt;
            items.push_back(std::move(*s));
            skip_ws();
            if (pos < text.size() && text[pos] == ',') {
                pos++;
                skip_ws();
                if (pos < text.size() && text[pos] == ']') { pos++; return items; }
                continue;
            }
            if (pos < text.size() && text[pos] == ']') {
                pos++;
                return items;
            }
            return std::nullopt;
        }
    }

    std::optional<std::vector<std::vector<std::string>>> parse_outer() {
        if (pos >= text.size() || text[pos] != '[') return std::nullopt;
        pos++;
        std::vector<std::vector<std::string>> rows;
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
            pos++;
            return rows;
        }
        while (true) {
            skip_ws();
            auto inner = parse_inner();
            if (!inner) return std::nullopt;
            rows.push_back(std::move(*inner));
            skip_ws();
            if (pos < text.size() && text[pos] == ',') {
                pos++;
                skip_ws();
                if (pos < text.size() && text[pos] == ']') { pos++; return rows; }
                continue;
            }
            if (pos < text.size() && text[pos] == ']') {
                pos++;
                return rows;
            }
            return std::nullopt;
        }
    }
};

} // namespace

TripleList parse_triples_literal(const std::string& response, std::vector<std::string>* warnings) {
    for (std::size_t start = response.find('['); start != std::string::npos;
         start = response.find('[', start + 1)) {
        LiteralParser parser{response, start};
        auto rows = parser.parse_outer();
        if (!rows) continue;
        TripleList triples;
        for (const auto& row : *rows) {
            if (row.size() != 3) {
                if (warnings) {
                    warnings->push_back("dropped inner list with " + std::to_string(row.size()) +
                                        " items (expected 3)");
                }
                continue;
            }
            triples.push_back({row[0], row[1], row[2]});
        }
        return triples;
    }
    throw NoLiteralFound("no list-of-lists literal in response");
}

} // namespace scribe::gateway
