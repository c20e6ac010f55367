#pragma once

#include <map>
#include <set>
#include <string>

#include "json.hpp"

namespace scribe::gateway {

// Prompt template names. Bodies live in templates/*.tmpl and ship compiled-in
// as defaults; an on-disk directory overrides them per deployment.
struct PromptTemplate {
    std::string name;
    std::string body;
    std::set<std::string> required_vars;
};

class TemplateStore {
public:
    // Built-in templates: classifier, direct_extract, judge, script_gen, qa, qa_eval.
    static TemplateStore builtin();
    // Built-ins plus any <name>.tmpl files found in `dir`.
    static TemplateStore from_dir(const std::string& dir);

    const PromptTemplate& get(const std::string& name) const;

    // Deterministic render; throws MissingVariable when a required variable
    // is absent. Supported syntax: {{ var }}, {{ var|length }},
    // {% if var %}...{% endif %}, {% for x in var %}...{% endfor %},
    // {{ loop.index0 }} inside loops.
    std::string render(const std::string& name, const nlohmann::json& vars) const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

// Standalone engine entry point used by TemplateStore and tests.
std::string render_template(const std::string& body, const nlohmann::json& vars);

} // namespace scribe::gateway
