#include "scribe/gateway/templates.hpp"

#include <filesystem>
#include <memory>
#include <vector>

#include "scribe/errors.hpp"
#include "scribe/util.hpp"
#include "scribe/gateway/builtin_templates.hpp"

namespace scribe::gateway {

namespace {

struct TNode;
using TNodeList = std::vector<std::unique_ptr<TNode>>;

struct TNode {
    enum class Kind { Text, Var, If, For } kind = Kind::Text;
    std::string text;      // Text content, Var expression, If condition, For list name
    std::string loop_var;  // For only
    TNodeList children;
};

struct Token {
    enum class Kind { Text, Var, Block } kind;
    std::string content;
};

// Jinja-style trim_blocks + lstrip_blocks for {% ... %} tags.
std::vector<Token> tokenize(const std::string& body) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t open = body.find('{', pos);
        if (open == std::string::npos || open + 1 >= body.size() ||
            (body[open + 1] != '{' && body[open + 1] != '%')) {
            if (open == std::string::npos) {
                tokens.push_back({Token::Kind::Text, body.substr(pos)});
                pos = body.size();
            } else {
                tokens.push_back({Token::Kind::Text, body.substr(pos, open + 1 - pos)});
                pos = open + 1;
            }
            continue;
        }
        if (open > pos) tokens.push_back({Token::Kind::Text, body.substr(pos, open - pos)});
        const bool is_block = body[open + 1] == '%';
        const std::string close = is_block ? "%}" : "}}";
        std::size_t end = body.find(close, open + 2);
        if (end == std::string::npos) throw Error("unterminated template tag");
        std::string content = util::trim(body.substr(open + 2, end - open - 2));
        if (is_block) {
            // lstrip: drop trailing spaces/tabs of the preceding text token.
            if (!tokens.empty() && tokens.back().kind == Token::Kind::Text) {
                std::string& prev = tokens.back().content;
                std::size_t cut = prev.find_last_not_of(" \t");
                if (cut == std::string::npos) prev.clear();
                else if (prev[cut] == '\n') prev.resize(cut + 1);
            }
            tokens.push_back({Token::Kind::Block, content});
            pos = end + 2;
            // trim: swallow one newline right after the tag.
            if (pos < body.size() && body[pos] == '\n') pos++;
            else if (pos + 1 < body.size() && body[pos] == '\r' && body[pos + 1] == '\n') pos += 2;
        } else {
            tokens.push_back({Token::Kind::Var, content});
            pos = end + 2;
        }
    }
    return tokens;
}

TNodeList parse_nodes(const std::vector<Token>& tokens, std::size_t& i,
                      const std::string& until) {
    TNodeList nodes;
    while (i < tokens.size()) {
        const Token& tok = tokens[i];
        if (tok.kind == Token::Kind::Text) {
            auto n = std::make_unique<TNode>();
            n->kind = TNode::Kind::Text;
            n->text = tok.content;
            nodes.push_back(std::move(n));
            i++;
            continue;
        }
        if (tok.kind == Token::Kind::Var) {
            auto n = std::make_unique<TNode>();
            n->kind = TNode::Kind::Var;
            n->text = tok.content;
            nodes.push_back(std::move(n));
            i++;
            continue;
        }
        // Block tag.
        if (tok.content == until) {
            i++;
            return nodes;
        }
        if (tok.content.rfind("if ", 0) == 0) {
            auto n = std::make_unique<TNode>();
            n->kind = TNode::Kind::If;
            n->text = util::trim(tok.content.substr(3));
            i++;
            n->children = parse_nodes(tokens, i, "endif");
            nodes.push_back(std::move(n));
            continue;
        }
        if (tok.content.rfind("for ", 0) == 0) {
            std::string rest = util::trim(tok.content.substr(4));
            std::size_t in_pos = rest.find(" in ");
            if (in_pos == std::string::npos) throw Error("malformed for tag: " + tok.content);
            auto n = std::make_unique<TNode>();
            n->kind = TNode::Kind::For;
            n->loop_var = util::trim(rest.substr(0, in_pos));
            n->text = util::trim(rest.substr(in_pos + 4));
            i++;
            n->children = parse_nodes(tokens, i, "endfor");
            nodes.push_back(std::move(n));
            continue;
        }
        throw Error("unknown template tag: " + tok.content);
    }
    if (!until.empty()) throw Error("missing {% " + until + " %}");
    return nodes;
}

struct Scope {
    const nlohmann::json* vars;
    const Scope* parent = nullptr;
    std::string local_name;
    const nlohmann::json* local_value = nullptr;

    const nlohmann::json* lookup(const std::string& name) const {
        for (const Scope* s = this; s; s = s->parent) {
            if (!s->local_name.empty() && s->local_name == name) return s->local_value;
            if (s->vars && s->vars->contains(name)) return &(*s->vars)[name];
        }
        return nullptr;
    }
};

const nlohmann::json* resolve_path(const std::string& expr, const Scope& scope) {
    std::size_t dot = expr.find('.');
    std::string head = dot == std::string::npos ? expr : expr.substr(0, dot);
    const nlohmann::json* value = scope.lookup(head);
    while (value && dot != std::string::npos) {
        std::size_t next = expr.find('.', dot + 1);
        std::string key = expr.substr(dot + 1, (next == std::string::npos ? expr.size() : next) - dot - 1);
        if (value->is_object() && value->contains(key)) value = &(*value)[key];
        else return nullptr;
        dot = next;
    }
    return value;
}

std::string stringify(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

bool truthy(const nlohmann::json* v) {
    if (!v || v->is_null()) return false;
    if (v->is_boolean()) return v->get<bool>();
    if (v->is_number()) return v->get<double>() != 0.0;
    if (v->is_string()) return !v->get<std::string>().empty();
    return !v->empty();
}

void render_nodes(const TNodeList& nodes, const Scope& scope, std::string& out);

void render_var(const std::string& expr, const Scope& scope, std::string& out) {
    std::string path = expr;
    bool want_length = false;
    std::size_t pipe = expr.find('|');
    if (pipe != std::string::npos) {
        std::string filter = util::trim(expr.substr(pipe + 1));
        if (filter != "length") throw Error("unsupported filter: " + filter);
        want_length = true;
        path = util::trim(expr.substr(0, pipe));
    }
    const nlohmann::json* v = resolve_path(path, scope);
    if (!v) throw MissingVariable("missing template variable: " + path);
    if (want_length) {
        out += std::to_string(v->is_string() ? v->get<std::string>().size() : v->size());
    } else {
        out += stringify(*v);
    }
}

void render_nodes(const TNodeList& nodes, const Scope& scope, std::string& out) {
    for (const auto& n : nodes) {
        switch (n->kind) {
            case TNode::Kind::Text:
                out += n->text;
                break;
            case TNode::Kind::Var:
                render_var(n->text, scope, out);
                break;
            case TNode::Kind::If:
                if (truthy(resolve_path(n->text, scope))) render_nodes(n->children, scope, out);
                break;
            case TNode::Kind::For: {
                const nlohmann::json* list = resolve_path(n->text, scope);
                if (!list || !list->is_array()) break;
                for (std::size_t idx = 0; idx < list->size(); idx++) {
                    nlohmann::json loop = {{"index0", idx}, {"index", idx + 1}};
                    Scope loop_scope{nullptr, &scope, "loop", &loop};
                    Scope item_scope{nullptr, &loop_scope, n->loop_var, &(*list)[idx]};
                    render_nodes(n->children, item_scope, out);
                }
                break;
            }
        }
    }
}

} // namespace

std::string render_template(const std::string& body, const nlohmann::json& vars) {
    std::vector<Token> tokens = tokenize(body);
    std::size_t i = 0;
    TNodeList nodes = parse_nodes(tokens, i, "");
    Scope root{&vars, nullptr, "", nullptr};
    std::string out;
    render_nodes(nodes, root, out);
    return out;
}

TemplateStore TemplateStore::builtin() {
    TemplateStore store;
    for (const auto& t : builtin_templates()) {
        store.templates_[t.name] = t;
    }
    return store;
}

TemplateStore TemplateStore::from_dir(const std::string& dir) {
    TemplateStore store = builtin();
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) return store;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".tmpl") continue;
        std::string name = entry.path().stem().string();
        auto it = store.templates_.find(name);
        std::set<std::string> required = it != store.templates_.end() ? it->second.required_vars
                                                                      : std::set<std::string>{};
        store.templates_[name] = PromptTemplate{name, util::read_file(entry.path().string()), required};
    }
    return store;
}

const PromptTemplate& TemplateStore::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw Error("unknown prompt template: " + name);
    return it->second;
}

std::string TemplateStore::render(const std::string& name, const nlohmann::json& vars) const {
    const PromptTemplate& t = get(name);
    for (const auto& required : t.required_vars) {
        if (!vars.contains(required)) {
            throw MissingVariable("template " + name + " requires variable: " + required);
        }
    }
    return render_template(t.body, vars);
}

} // namespace scribe::gateway
