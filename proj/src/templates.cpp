#include "rageval/templates.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "rageval/common.hpp"

namespace rageval::templates {

namespace fs = std::filesystem;

std::string category_name(TemplateCategory c) {
    switch (c) {
        case TemplateCategory::baseline: return "baseline";
        case TemplateCategory::foundational: return "foundational";
        case TemplateCategory::reasoning: return "reasoning";
        case TemplateCategory::self_correction: return "self_correction";
        case TemplateCategory::advanced: return "advanced";
        case TemplateCategory::hybrid: return "hybrid";
    }
    throw TemplateError("unknown category value");
}

TemplateCategory category_from_name(const std::string& name) {
    static const std::map<std::string, TemplateCategory> table = {
        {"baseline", TemplateCategory::baseline},
        {"foundational", TemplateCategory::foundational},
        {"reasoning", TemplateCategory::reasoning},
        {"self_correction", TemplateCategory::self_correction},
        {"advanced", TemplateCategory::advanced},
        {"hybrid", TemplateCategory::hybrid},
    };
    auto it = table.find(name);
    if (it == table.end()) throw TemplateError("unknown category: " + name);
    return it->second;
}

namespace {

std::string doc_label(DocLabelStyle style, std::size_t one_based) {
    std::string n = std::to_string(one_based);
    switch (style) {
        case DocLabelStyle::doc_bracket: return "[DOC-" + n + "]";
        case DocLabelStyle::d_bracket: return "[D" + n + "]";
        case DocLabelStyle::doc_plain: return "Doc" + n + ":";
        case DocLabelStyle::num_bracket: return "[" + n + "]";
    }
    throw TemplateError("unknown doc label style");
}

bool placeholder_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

/// Splits a body into literal chunks and placeholder names. A '{' opens a
/// placeholder only when followed by [a-z0-9_]+ and a closing '}'; any other
/// '{' (JSON braces in bodies, for instance) stays literal.
struct BodyPiece {
    bool is_placeholder;
    std::string text;  // literal bytes or placeholder name
};

std::vector<BodyPiece> scan_body(const std::string& body) {
    std::vector<BodyPiece> pieces;
    std::string literal;
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            std::size_t j = i + 1;
            while (j < body.size() && placeholder_char(body[j])) ++j;
            if (j > i + 1 && j < body.size() && body[j] == '}') {
                if (!literal.empty()) {
                    pieces.push_back({false, literal});
                    literal.clear();
                }
                pieces.push_back({true, body.substr(i + 1, j - i - 1)});
                i = j + 1;
                continue;
            }
        }
        literal.push_back(body[i]);
        ++i;
    }
    if (!literal.empty()) pieces.push_back({false, literal});
    return pieces;
}

const std::set<std::string> kKnownSlots = {"question", "context", "documents"};

}  // namespace

std::string format_context(const std::vector<std::string>& documents, ContextMode mode,
                           DocLabelStyle style) {
    if (documents.empty()) throw TemplateError("cannot format an empty document list");
    std::string out;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (i > 0) out += (mode == ContextMode::monolithic) ? "\n\n" : "\n";
        if (mode == ContextMode::enumerated) {
            out += doc_label(style, i + 1);
            out += ' ';
        }
        out += documents[i];
    }
    return out;
}

void validate_template(const PromptTemplate& tpl) {
    if (tpl.id.empty()) throw TemplateError("template id is empty");
    for (char c : tpl.id) {
        if (!placeholder_char(c))
            throw TemplateError("template id must be snake_case: " + tpl.id);
    }
    if (tpl.body.empty()) throw TemplateError(tpl.id + ": body is empty");

    bool has_question = false;
    bool has_context_slot = false;
    for (const auto& piece : scan_body(tpl.body)) {
        if (!piece.is_placeholder) continue;
        if (kKnownSlots.find(piece.text) == kKnownSlots.end())
            throw TemplateError(tpl.id + ": unknown placeholder {" + piece.text + "}");
        if (piece.text == "question") has_question = true;
        if (tpl.context_mode == ContextMode::monolithic && piece.text == "context")
            has_context_slot = true;
        if (tpl.context_mode == ContextMode::enumerated && piece.text == "documents")
            has_context_slot = true;
    }
    if (!has_question) throw TemplateError(tpl.id + ": body never uses {question}");
    if (!has_context_slot) {
        const char* slot =
            tpl.context_mode == ContextMode::monolithic ? "{context}" : "{documents}";
        throw TemplateError(tpl.id + ": body never uses " + std::string(slot));
    }
}

RenderedPrompt render(const PromptTemplate& tpl, const corpus::QaInstance& instance) {
    if (instance.documents.empty())
        throw TemplateError(tpl.id + ": instance " + instance.id + " has no documents");
    // Substituted values are appended verbatim; braces inside instance data
    // never trigger a second expansion.
    std::string out;
    out.reserve(tpl.body.size() + 256);
    for (const auto& piece : scan_body(tpl.body)) {
        if (!piece.is_placeholder) {
            out += piece.text;
        } else if (piece.text == "question") {
            out += instance.question;
        } else if (piece.text == "context") {
            out += format_context(instance.documents, ContextMode::monolithic,
                                  tpl.doc_label_style);
        } else if (piece.text == "documents") {
            out += format_context(instance.documents, ContextMode::enumerated,
                                  tpl.doc_label_style);
        } else {
            throw TemplateError(tpl.id + ": unknown placeholder {" + piece.text + "}");
        }
    }
    RenderedPrompt rp;
    rp.template_id = tpl.id;
    rp.instance_id = instance.id;
    rp.text = std::move(out);
    rp.char_length = rp.text.size();
    return rp;
}

const PromptTemplate& find_template(const std::string& id) {
    for (const auto& tpl : registry()) {
        if (tpl.id == id) return tpl;
    }
    throw TemplateError("no such template: " + id);
}

std::vector<PromptTemplate> load_template_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw TemplateError("not a template directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tpl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::set<std::string> taken;
    for (const auto& tpl : registry()) taken.insert(tpl.id);

    std::vector<PromptTemplate> loaded;
    for (const auto& path : files) {
        std::string text = normalize_newlines(read_file(path.string()));
        std::istringstream in(text);
        std::string line;
        PromptTemplate tpl;
        tpl.reconstructed = false;
        bool saw_separator = false;
        std::size_t header_chars = 0;
        while (std::getline(in, line)) {
            header_chars += line.size() + 1;
            if (trim(line) == "---") {
                saw_separator = true;
                break;
            }
            if (trim(line).empty()) continue;
            std::size_t colon = line.find(':');
            if (colon == std::string::npos)
                throw TemplateError(path.string() + ": header line without ':': " + line);
            std::string key = trim(line.substr(0, colon));
            std::string value = trim(line.substr(colon + 1));
            if (key == "id") {
                tpl.id = value;
            } else if (key == "category") {
                tpl.category = category_from_name(value);
            } else if (key == "context_mode") {
                if (value == "monolithic") tpl.context_mode = ContextMode::monolithic;
                else if (value == "enumerated") tpl.context_mode = ContextMode::enumerated;
                else throw TemplateError(path.string() + ": unknown context_mode: " + value);
            } else if (key == "doc_label_style") {
                if (value == "doc_bracket") tpl.doc_label_style = DocLabelStyle::doc_bracket;
                else if (value == "d_bracket") tpl.doc_label_style = DocLabelStyle::d_bracket;
                else if (value == "doc_plain") tpl.doc_label_style = DocLabelStyle::doc_plain;
                else if (value == "num_bracket") tpl.doc_label_style = DocLabelStyle::num_bracket;
                else throw TemplateError(path.string() + ": unknown doc_label_style: " + value);
            } else {
                throw TemplateError(path.string() + ": unknown header key: " + key);
            }
        }
        if (!saw_separator)
            throw TemplateError(path.string() + ": missing '---' header terminator");
        // Body is everything after the separator line, minus one trailing
        // newline (editors add one at EOF).
        std::string body = text.substr(std::min(header_chars, text.size()));
        if (!body.empty() && body.back() == '\n') body.pop_back();
        tpl.body = body;
        validate_template(tpl);
        if (!taken.insert(tpl.id).second)
            throw TemplateError(path.string() + ": duplicate template id: " + tpl.id);
        loaded.push_back(std::move(tpl));
    }
    return loaded;
}

}  // namespace rageval::templates
