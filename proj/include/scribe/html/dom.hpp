#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scribe::html {

enum class NodeKind { Document, Element, Text, Comment };

struct Attribute {
    std::string name;
    std::string value;
    bool has_value = true; // false for bare boolean attributes like `required`
};

struct Node {
    NodeKind kind = NodeKind::Text;
    std::string tag;                 // Element only, lowercased
    std::vector<Attribute> attrs;    // Element only, source order
    std::string text;                // Text content or Comment data
    std::vector<std::unique_ptr<Node>> children;
    bool is_void = false;

    bool is_element() const { return kind == NodeKind::Element; }
    const Attribute* find_attr(std::string_view name) const;
    // Sorted, deduplicated class tokens.
    std::vector<std::string> class_list() const;
};

using DomTree = std::unique_ptr<Node>;

struct RawHtmlDocument {
    std::string url;
    std::string html;
    std::optional<std::string> title;
};

bool is_void_tag(std::string_view tag);

// Lenient HTML parse; returns nullopt on unrecoverable failure (empty or
// whitespace-only input) so callers can pass the raw string through.
std::optional<DomTree> parse_html(const std::string& html);
inline std::optional<DomTree> parse_html(const RawHtmlDocument& raw) { return parse_html(raw.html); }

std::string serialize(const Node& node);

} // namespace scribe::html
