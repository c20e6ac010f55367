#pragma once

#include <set>
#include <string>
#include <vector>

#include "scribe/html/dom.hpp"

namespace scribe::html {

struct SiblingSignature {
    std::string tag;
    std::vector<std::string> classes; // sorted, no duplicates

    bool operator==(const SiblingSignature&) const = default;
    auto operator<=>(const SiblingSignature&) const = default;
};

struct DedupConfig {
    int z = 3; // siblings kept per signature group
    std::set<std::string> remove_tags = {
        "script", "style", "noscript", "iframe", "embed",
        "object", "applet", "meta", "link", "base"};
    std::set<std::string> keep_attrs = {
        "id", "class", "role", "name", "type", "href", "src", "alt", "title",
        "rel", "target", "for", "action", "method", "value", "placeholder",
        "required"};
    // data- and aria- prefixed attributes are always kept.
    std::set<std::string> container_tags = {
        "ul", "ol", "div", "section", "tbody", "thead", "select"};
    bool normalize_whitespace = true;
};

SiblingSignature signature_of(const Node& element);

// Marker comment data shared by dedup and its tests:
// " ... N more <tag class='c1 c2'> elements ... " (class part omitted when
// the signature has no classes).
std::string marker_comment_text(int removed, const SiblingSignature& sig);

// Keep-z structure-preserving deduplication. On parse failure the input is
// returned unchanged.
std::string dedup_html(const RawHtmlDocument& raw, const DedupConfig& config = {});

// Markup-free linearization: text nodes in document order, whitespace runs
// collapsed, script/style/noscript text excluded. On parse failure returns
// the input stripped of angle-bracket runs.
std::string flatten_html(const RawHtmlDocument& raw);

} // namespace scribe::html
