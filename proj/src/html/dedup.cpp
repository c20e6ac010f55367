#include "scribe/html/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace scribe::html {

namespace {

bool has_prefix(const std::string& s, const char* prefix) {
    return s.rfind(prefix, 0) == 0;
}

bool keep_attribute(const std::string& name, const DedupConfig& config) {
    if (config.keep_attrs.count(name)) return true;
    return has_prefix(name, "data-") || has_prefix(name, "aria-");
}

bool is_marker_comment(const Node& node) {
    if (node.kind != NodeKind::Comment) return false;
    std::size_t i = node.text.find_first_not_of(" \t\r\n");
    return i != std::string::npos && node.text.compare(i, 3, "...") == 0;
}

void strip_tree(Node& node, const DedupConfig& config) {
    auto& children = node.children;
    children.erase(
        std::remove_if(children.begin(), children.end(),
                       [&](const std::unique_ptr<Node>& c) {
                           if (c->is_element()) return config.remove_tags.count(c->tag) > 0;
                           if (c->kind == NodeKind::Comment) return !is_marker_comment(*c);
                           return false;
                       }),
        children.end());
    for (auto& c : children) {
        if (!c->is_element()) continue;
        auto& attrs = c->attrs;
        attrs.erase(std::remove_if(attrs.begin(), attrs.end(),
                                   [&](const Attribute& a) { return !keep_attribute(a.name, config); }),
                    attrs.end());
        strip_tree(*c, config);
    }
}

void keep_z(Node& node, const DedupConfig& config) {
    if (node.is_element() && config.container_tags.count(node.tag)) {
        // Count element children per signature, first-occurrence order.
        std::map<SiblingSignature, int> totals;
        for (const auto& c : node.children) {
            if (c->is_element()) totals[signature_of(*c)]++;
        }
        std::map<SiblingSignature, int> seen;
        std::vector<std::unique_ptr<Node>> kept;
        kept.reserve(node.children.size());
        for (auto& c : node.children) {
            if (!c->is_element()) {
                kept.push_back(std::move(c));
                continue;
            }
            SiblingSignature sig = signature_of(*c);
            int total = totals[sig];
            int order = ++seen[sig];
            if (total <= config.z || order < config.z) {
                kept.push_back(std::move(c));
            } else if (order == config.z) {
                kept.push_back(std::move(c));
                auto marker = std::make_unique<Node>();
                marker->kind = NodeKind::Comment;
                marker->text = marker_comment_text(total - config.z, sig);
                kept.push_back(std::move(marker));
            }
            // order > z with total > z: dropped.
        }
        node.children = std::move(kept);
    }
    for (auto& c : node.children) keep_z(*c, config);
}

void collapse_ws(std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_ws = false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out += ' ';
        if (in_ws && out.empty()) out += ' ';
        in_ws = false;
        out += c;
    }
    if (in_ws) out += ' ';
    text = std::move(out);
}

void normalize_tree(Node& node) {
    static const std::set<std::string> raw = {"script", "style", "textarea", "pre"};
    if (node.is_element() && raw.count(node.tag)) return;
    for (auto& c : node.children) {
        if (c->kind == NodeKind::Text) collapse_ws(c->text);
        normalize_tree(*c);
    }
}

void collect_text(const Node& node, std::string& out) {
    static const std::set<std::string> skip = {"script", "style", "noscript"};
    if (node.is_element() && skip.count(node.tag)) return;
    if (node.kind == NodeKind::Text) {
        out += node.text;
        out += ' ';
        return;
    }
    for (const auto& c : node.children) collect_text(*c, out);
}

std::string strip_markup_best_effort(const std::string& html) {
    std::string out;
    out.reserve(html.size());
    bool in_tag = false;
    for (char c : html) {
        if (c == '<') { in_tag = true; continue; }
        if (c == '>') { in_tag = false; continue; }
        if (!in_tag) out += c;
    }
    collapse_ws(out);
    std::size_t b = out.find_first_not_of(' ');
    std::size_t e = out.find_last_not_of(' ');
    return b == std::string::npos ? std::string() : out.substr(b, e - b + 1);
}

} // namespace

SiblingSignature signature_of(const Node& element) {
    return SiblingSignature{element.tag, element.class_list()};
}

std::string marker_comment_text(int removed, const SiblingSignature& sig) {
    std::string text = " ... " + std::to_string(removed) + " more <" + sig.tag;
    if (!sig.classes.empty()) {
        text += " class='";
        for (std::size_t i = 0; i < sig.classes.size(); i++) {
            if (i) text += ' ';
            text += sig.classes[i];
        }
        text += '\'';
    }
    text += "> elements ... ";
    return text;
}

std::string dedup_html(const RawHtmlDocument& raw, const DedupConfig& config) {
    auto tree = parse_html(raw);
    if (!tree) return raw.html; // Algorithm fallback: pass input through.
    strip_tree(**tree, config);
    keep_z(**tree, config);
    if (config.normalize_whitespace) normalize_tree(**tree);
    return serialize(**tree);
}

std::string flatten_html(const RawHtmlDocument& raw) {
    auto tree = parse_html(raw);
    if (!tree) return strip_markup_best_effort(raw.html);
    std::string out;
    collect_text(**tree, out);
    collapse_ws(out);
    std::size_t b = out.find_first_not_of(' ');
    std::size_t e = out.find_last_not_of(' ');
    return b == std::string::npos ? std::string() : out.substr(b, e - b + 1);
}

} // namespace scribe::html
