/// @file templates.hpp
/// @brief Prompt template registry and renderer.
///
/// A template body is plain text with `{placeholder}` slots. Three slots are
/// built in: `{question}`, `{context}` (all documents joined into one block)
/// and `{documents}` (one labeled line per document, label style per
/// template). Anything else is a registration error. 24 strategies ship in
/// the registry; extra ones can be loaded from a directory at runtime.
#pragma once

#include <string>
#include <vector>

#include "rageval/corpus.hpp"

namespace rageval::templates {

enum class TemplateCategory {
    baseline,
    foundational,
    reasoning,
    self_correction,
    advanced,
    hybrid,
};

std::string category_name(TemplateCategory c);
TemplateCategory category_from_name(const std::string& name);

/// How documents are presented to the model.
enum class ContextMode {
    monolithic,  // one block, documents joined by a blank line
    enumerated,  // one labeled line per document
};

/// Label prefix used by enumerated templates.
enum class DocLabelStyle {
    doc_bracket,  // [DOC-1]
    d_bracket,    // [D1]
    doc_plain,    // Doc1:
    num_bracket,  // [1]
};

struct PromptTemplate {
    std::string id;  // snake_case, unique
    TemplateCategory category = TemplateCategory::baseline;
    std::string body;
    ContextMode context_mode = ContextMode::monolithic;
    DocLabelStyle doc_label_style = DocLabelStyle::doc_bracket;
    /// True when the body was rebuilt from a partial published description
    /// rather than copied verbatim from one.
    bool reconstructed = false;
};

struct RenderedPrompt {
    std::string template_id;
    std::string instance_id;
    std::string text;
    std::size_t char_length = 0;
};

/// All 24 built-in strategies: 1 baseline, 2 foundational, 2 reasoning,
/// 2 self-correction, 3 advanced, 14 hybrid. Order and ids are stable and
/// pinned by tests.
const std::vector<PromptTemplate>& registry();

/// Lookup by id in the built-in registry. Throws TemplateError when absent.
const PromptTemplate& find_template(const std::string& id);

/// Joins documents per mode/style. Monolithic: blank-line separated.
/// Enumerated: "<label> <text>" lines ("Doc1: <text>" for doc_plain).
/// Throws TemplateError on zero documents.
std::string format_context(const std::vector<std::string>& documents, ContextMode mode,
                           DocLabelStyle style);

/// Substitutes every placeholder in one pass; placeholder text occurring
/// inside instance data is NOT re-expanded. Throws TemplateError on unknown
/// or malformed placeholders.
RenderedPrompt render(const PromptTemplate& tpl, const corpus::QaInstance& instance);

/// Checks id, body and placeholder grammar; used for registry entries and
/// user-supplied templates alike. Throws TemplateError.
void validate_template(const PromptTemplate& tpl);

/// Loads "*.tpl" files from a directory. File format: "key: value" header
/// lines (id, category, context_mode, doc_label_style), then a "---" line,
/// then the verbatim body. Ids must not collide with the registry or each
/// other. Files are loaded in lexicographic name order.
std::vector<PromptTemplate> load_template_dir(const std::string& dir);

}  // namespace rageval::templates
