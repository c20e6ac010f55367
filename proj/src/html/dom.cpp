#include "scribe/html/dom.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

namespace scribe::html {

namespace {

const std::set<std::string>& void_tags() {
    static const std::set<std::string> tags = {
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "link", "meta", "param", "source", "track", "wbr"};
    return tags;
}

const std::set<std::string>& raw_text_tags() {
    static const std::set<std::string> tags = {"script", "style", "textarea", "title"};
    return tags;
}

const std::set<std::string>& p_closers() {
    static const std::set<std::string> tags = {
        "address", "article", "aside", "blockquote", "div", "dl", "fieldset",
        "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
        "main", "nav", "ol", "p", "pre", "section", "table", "ul"};
    return tags;
}

// True when an open <top> element is implicitly closed by a new <incoming> tag.
bool implied_close(const std::string& top, const std::string& incoming) {
    if (top == "li") return incoming == "li";
    if (top == "td" || top == "th") return incoming == "td" || incoming == "th" || incoming == "tr";
    if (top == "tr") return incoming == "tr";
    if (top == "option") return incoming == "option" || incoming == "optgroup";
    if (top == "dt" || top == "dd") return incoming == "dt" || incoming == "dd";
    if (top == "p") return p_closers().count(incoming) > 0;
    return false;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Minimal entity decoding for text and attribute values.
std::string decode_entities(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size();) {
        if (in[i] != '&') {
            out += in[i++];
            continue;
        }
        std::size_t semi = in.find(';', i + 1);
        if (semi == std::string::npos || semi - i > 10) {
            out += in[i++];
            continue;
        }
        std::string name = in.substr(i + 1, semi - i - 1);
        if (name == "amp") out += '&';
        else if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "quot") out += '"';
        else if (name == "apos") out += '\'';
        else if (name == "nbsp") out += ' ';
        else if (!name.empty() && name[0] == '#') {
            long code = 0;
            bool ok = true;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t j = 2; j < name.size(); j++) {
                    if (!std::isxdigit(static_cast<unsigned char>(name[j]))) { ok = false; break; }
                    code = code * 16 + (std::isdigit(static_cast<unsigned char>(name[j]))
                                            ? name[j] - '0'
                                            : std::tolower(static_cast<unsigned char>(name[j])) - 'a' + 10);
                }
            } else {
                for (std::size_t j = 1; j < name.size(); j++) {
                    if (!std::isdigit(static_cast<unsigned char>(name[j]))) { ok = false; break; }
                    code = code * 10 + (name[j] - '0');
                }
            }
            if (!ok || name.size() < 2) {
                out += in[i++];
                continue;
            }
            // Encode the code point back as UTF-8.
            unsigned long cp = static_cast<unsigned long>(code);
            if (cp < 0x80) out += static_cast<char>(cp);
            else if (cp < 0x800) {
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
        } else {
            out += in[i++];
            continue;
        }
        i = semi + 1;
    }
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& html) : html_(html) {}

    DomTree parse() {
        auto doc = std::make_unique<Node>();
        doc->kind = NodeKind::Document;
        stack_.push_back(doc.get());
        while (pos_ < html_.size()) {
            if (html_[pos_] == '<') {
                handle_markup();
            } else {
                handle_text();
            }
        }
        return doc;
    }

private:
    Node* top() { return stack_.back(); }

    void append_text(std::string text) {
        if (text.empty()) return;
        auto& children = top()->children;
        if (!children.empty() && children.back()->kind == NodeKind::Text) {
            children.back()->text += text;
            return;
        }
        auto node = std::make_unique<Node>();
        node->kind = NodeKind::Text;
        node->text = std::move(text);
        children.push_back(std::move(node));
    }

    void handle_text() {
        std::size_t next = html_.find('<', pos_);
        if (next == std::string::npos) next = html_.size();
        append_text(decode_entities(html_.substr(pos_, next - pos_)));
        pos_ = next;
    }

    void handle_markup() {
        if (html_.compare(pos_, 4, "<!--") == 0) {
            std::size_t end = html_.find("-->", pos_ + 4);
            std::string data = (end == std::string::npos)
                                   ? html_.substr(pos_ + 4)
                                   : html_.substr(pos_ + 4, end - pos_ - 4);
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Comment;
            node->text = std::move(data);
            top()->children.push_back(std::move(node));
            pos_ = (end == std::string::npos) ? html_.size() : end + 3;
            return;
        }
        if (pos_ + 1 < html_.size() && (html_[pos_ + 1] == '!' || html_[pos_ + 1] == '?')) {
            // Doctype / processing instruction: dropped.
            std::size_t end = html_.find('>', pos_);
            pos_ = (end == std::string::npos) ? html_.size() : end + 1;
            return;
        }
        if (pos_ + 1 < html_.size() && html_[pos_ + 1] == '/') {
            handle_close_tag();
            return;
        }
        if (pos_ + 1 >= html_.size() ||
            !std::isalpha(static_cast<unsigned char>(html_[pos_ + 1]))) {
            // Stray '<': treat as text.
            append_text("<");
            pos_++;
            return;
        }
        handle_open_tag();
    }

    void handle_close_tag() {
        std::size_t end = html_.find('>', pos_);
        std::string name = to_lower(html_.substr(pos_ + 2, (end == std::string::npos ? html_.size() : end) - pos_ - 2));
        // Strip attributes/whitespace in the close tag if any.
        std::size_t ws = name.find_first_of(" \t\r\n/");
        if (ws != std::string::npos) name = name.substr(0, ws);
        pos_ = (end == std::string::npos) ? html_.size() : end + 1;
        // Pop to the matching open element; ignore unmatched close tags.
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag == name) {
                stack_.resize(i);
                return;
            }
        }
    }

    void handle_open_tag() {
        std::size_t i = pos_ + 1;
        std::string name;
        while (i < html_.size() &&
               (std::isalnum(static_cast<unsigned char>(html_[i])) || html_[i] == '-' ||
                html_[i] == '_' || html_[i] == ':')) {
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(html_[i])));
            i++;
        }
        auto node = std::make_unique<Node>();
        node->kind = NodeKind::Element;
        node->tag = name;
        bool self_closing = false;
        // Attributes.
        while (i < html_.size() && html_[i] != '>') {
            if (std::isspace(static_cast<unsigned char>(html_[i]))) { i++; continue; }
            if (html_[i] == '/') {
                self_closing = true;
                i++;
                continue;
            }
            Attribute attr;
            while (i < html_.size() && html_[i] != '=' && html_[i] != '>' && html_[i] != '/' &&
                   !std::isspace(static_cast<unsigned char>(html_[i]))) {
                attr.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html_[i])));
                i++;
            }
            while (i < html_.size() && std::isspace(static_cast<unsigned char>(html_[i]))) i++;
            if (i < html_.size() && html_[i] == '=') {
                i++;
                while (i < html_.size() && std::isspace(static_cast<unsigned char>(html_[i]))) i++;
                if (i < html_.size() && (html_[i] == '"' || html_[i] == '\'')) {
                    char quote = html_[i++];
                    std::size_t close = html_.find(quote, i);
                    if (close == std::string::npos) close = html_.size();
                    attr.value = decode_entities(html_.substr(i, close - i));
                    i = std::min(close + 1, html_.size());
                } else {
                    std::string raw;
                    while (i < html_.size() && html_[i] != '>' &&
                           !std::isspace(static_cast<unsigned char>(html_[i]))) {
                        raw += html_[i++];
                    }
                    attr.value = decode_entities(raw);
                }
            } else {
                attr.has_value = false;
            }
            if (!attr.name.empty()) node->attrs.push_back(std::move(attr));
        }
        if (i < html_.size()) i++; // consume '>'
        pos_ = i;
        if (name.empty()) return;

        while (stack_.size() > 1 && implied_close(top()->tag, name)) {
            stack_.pop_back();
        }

        bool is_void = void_tags().count(name) > 0;
        node->is_void = is_void;
        Node* raw = node.get();
        top()->children.push_back(std::move(node));
        if (is_void || self_closing) return;
        if (raw_text_tags().count(name)) {
            read_raw_text(raw);
            return;
        }
        stack_.push_back(raw);
    }

    void read_raw_text(Node* element) {
        // Consume verbatim up to the matching close tag.
        std::string needle = "</" + element->tag;
        std::size_t end = pos_;
        while (true) {
            end = html_.find(needle, end);
            if (end == std::string::npos) {
                end = html_.size();
                break;
            }
            std::size_t after = end + needle.size();
            if (after >= html_.size() || html_[after] == '>' ||
                std::isspace(static_cast<unsigned char>(html_[after]))) {
                break;
            }
            end = after;
        }
        std::string text = html_.substr(pos_, end - pos_);
        if (!text.empty()) {
            auto child = std::make_unique<Node>();
            child->kind = NodeKind::Text;
            child->text = element->tag == "title" ? decode_entities(text) : text;
            element->children.push_back(std::move(child));
        }
        if (end >= html_.size()) {
            pos_ = html_.size();
            return;
        }
        std::size_t close = html_.find('>', end);
        pos_ = (close == std::string::npos) ? html_.size() : close + 1;
    }

    const std::string& html_;
    std::size_t pos_ = 0;
    std::vector<Node*> stack_;
};

void escape_text(const std::string& in, std::string& out) {
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
}

void escape_attr(const std::string& in, std::string& out) {
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
}

void serialize_node(const Node& node, std::string& out) {
    switch (node.kind) {
        case NodeKind::Document:
            for (const auto& c : node.children) serialize_node(*c, out);
            return;
        case NodeKind::Text:
            escape_text(node.text, out);
            return;
        case NodeKind::Comment:
            out += "<!--";
            out += node.text;
            out += "-->";
            return;
        case NodeKind::Element:
            break;
    }
    out += '<';
    out += node.tag;
    for (const auto& a : node.attrs) {
        out += ' ';
        out += a.name;
        if (a.has_value) {
            out += "=\"";
            escape_attr(a.value, out);
            out += '"';
        }
    }
    if (node.is_void) {
        out += "/>";
        return;
    }
    out += '>';
    if (raw_text_tags().count(node.tag)) {
        for (const auto& c : node.children) out += c->text; // verbatim
    } else {
        for (const auto& c : node.children) serialize_node(*c, out);
    }
    out += "</";
    out += node.tag;
    out += '>';
}

} // namespace

const Attribute* Node::find_attr(std::string_view name) const {
    for (const auto& a : attrs) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

std::vector<std::string> Node::class_list() const {
    std::vector<std::string> classes;
    const Attribute* attr = find_attr("class");
    if (!attr) return classes;
    std::istringstream in(attr->value);
    std::string token;
    while (in >> token) classes.push_back(token);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

bool is_void_tag(std::string_view tag) {
    return void_tags().count(std::string(tag)) > 0;
}

std::optional<DomTree> parse_html(const std::string& html) {
    bool all_space = true;
    for (char c : html) {
        if (!std::isspace(static_cast<unsigned char>(c))) { all_space = false; break; }
    }
    if (all_space) return std::nullopt;
    return Parser(html).parse();
}

std::string serialize(const Node& node) {
    std::string out;
    serialize_node(node, out);
    return out;
}

} // namespace scribe::html
