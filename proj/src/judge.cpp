#include "rageval/judge.hpp"

#include <cmath>

#include "rageval/common.hpp"

namespace rageval::judge {

void WeightProfile::validate() const {
    if (weights.empty()) throw ConfigError("weight profile is empty");
    double sum = 0.0;
    for (const auto& [name, w] : weights) {
        if (name.empty()) throw ConfigError("weight profile has an unnamed dimension");
        if (w <= 0.0) throw ConfigError("weight for " + name + " must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("weights must sum to 1, got " + format_fixed(sum, 6));
}

const WeightProfile& default_weight_profile() {
    static const WeightProfile profile = [] {
        WeightProfile p;
        p.weights = {
            {"semantic_alignment", 0.35},
            {"information_accuracy", 0.25},
            {"logical_coherence", 0.20},
            {"response_completeness", 0.15},
            {"practical_utility", 0.05},
        };
        p.validate();
        return p;
    }();
    return profile;
}

double weighted_sum(const DimensionScores& scores, const WeightProfile& profile) {
    profile.validate();
    double total = 0.0;
    for (const auto& [name, w] : profile.weights) {
        auto it = scores.find(name);
        if (it == scores.end()) throw ConfigError("missing dimension score: " + name);
        double s = it->second;
        if (s < 0.0 || s > 1.0)
            throw ConfigError("dimension score out of [0,1]: " + name + " = " +
                              format_fixed(s, 6));
        total += w * s;
    }
    if (total < 0.0) total = 0.0;
    if (total > 1.0) total = 1.0;  // guard float dust at the boundary
    return total;
}

namespace {

// The evaluation prompt. Weights in the text must stay in lockstep with
// default_weight_profile().
constexpr const char* kJudgePromptBody =
    R"judge(You are an expert evaluator assessing RAG system outputs across different prompting strategies.

EVALUATION FRAMEWORK:

Assess the quality of the RAG Answer compared to the Ground Truth, considering both semantic meaning and practical utility.

SCORING DIMENSIONS (weights in parentheses):

1. SEMANTIC_ALIGNMENT (35%): How well does the answer capture the essential meaning and concepts?
   - Consider conceptual completeness, not word-for-word matching
   - Evaluate understanding depth and nuance preservation
2. INFORMATION_ACCURACY (25%): Are facts, entities, numbers, and relationships correct?
   - Verify specific claims against ground truth
   - Check for hallucinations or fabrications
3. LOGICAL_COHERENCE (20%): Is the answer internally consistent and well-structured?
   - Assess reasoning flow and argument structure
   - Check for contradictions or gaps in logic
4. RESPONSE_COMPLETENESS (15%): Does the answer fully address the question?
   - Evaluate coverage of all question aspects
   - Consider whether key points are missing
5. PRACTICAL_UTILITY (5%): How useful would this answer be to a real user?
   - Consider clarity and actionability
   - Assess if the response provides value

SCORING SCALE:

- Use values between 0.001 and 0.999 (never exactly 0 or 1)
- 0.850-0.999: Excellent performance
- 0.650-0.849: Good performance
- 0.450-0.649: Moderate performance
- 0.250-0.449: Below average performance
- 0.001-0.249: Poor performance

EVALUATION PROCESS:

1. First, identify the core information units in the Ground Truth
2. Map these against what's provided in the RAG Answer
3. Assess each dimension independently
4. Calculate weighted final score
5. Create Final Response = SEMANTIC_ALIGNMENT + INFORMATION_ACCURACY + LOGICAL_COHERENCE + RESPONSE_COMPLETENESS + PRACTICAL_UTILITY (Result will be from 0.000 to 1.000)

OUTPUT REQUIREMENT:

Your evaluation should result in a single floating-point number between 0.000 (completely incorrect) and 1.000 (perfectly correct). Do not provide any explanation or additional text. Your response must be only the numeric score with two decimal places.

QUESTION:

<<question>>

GROUND TRUTH:

<<ground_truth>>

RAG ANSWER:

<<rag_answer>>

Your Numeric Evaluation (0.000 to 1.000):)judge";

struct Token {
    double value = 0.0;
    int frac_digits = 0;
    bool negative = false;
};

/// Scans for the next maximal numeric token starting at or after `pos`.
std::optional<Token> next_token(const std::string& s, std::size_t& pos) {
    std::size_t i = pos;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) return std::nullopt;
    Token tok;
    tok.negative = i > 0 && s[i - 1] == '-';
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && s[i] == '.' && i + 1 < s.size() &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
        std::size_t frac_start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        tok.frac_digits = static_cast<int>(i - frac_start);
    }
    auto parsed = parse_double(s.substr(start, i - start));
    if (!parsed) return std::nullopt;  // overlong digit runs
    tok.value = *parsed;
    pos = i;
    return tok;
}

double check_range(const Token& tok, bool* exact_bound) {
    double v = tok.negative ? -tok.value : tok.value;
    if (v < 0.0 || v > 1.0)
        throw ScoreParseError("score out of range: " + format_fixed(v, 3));
    if (exact_bound) *exact_bound = (v == 0.0 || v == 1.0);
    return v;
}

}  // namespace

std::string build_judge_prompt(const std::string& question, const std::string& ground_truth,
                               const std::string& rag_answer) {
    if (trim(question).empty()) throw ConfigError("judge prompt: question is empty");
    if (trim(ground_truth).empty()) throw ConfigError("judge prompt: ground truth is empty");
    if (trim(rag_answer).empty()) throw ConfigError("judge prompt: rag answer is empty");
    // Single pass over the template so marker-looking text inside the inputs
    // is never expanded.
    static const std::string markers[3] = {"<<question>>", "<<ground_truth>>", "<<rag_answer>>"};
    const std::string* values[3] = {&question, &ground_truth, &rag_answer};
    const std::string tpl = kJudgePromptBody;
    std::string out;
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        std::size_t m = tpl.find(markers[i], pos);
        out += tpl.substr(pos, m - pos);
        out += *values[i];
        pos = m + markers[i].size();
    }
    out += tpl.substr(pos);
    return out;
}

double parse_score(const std::string& reply, bool* exact_bound) {
    std::size_t pos = 0;
    while (true) {
        auto tok = next_token(reply, pos);
        if (!tok) throw ScoreParseError("no numeric token in judge reply");
        if (tok->frac_digits > 3) continue;  // not a deliberate score
        return check_range(*tok, exact_bound);
    }
}

double parse_score_strict(const std::string& reply, bool* exact_bound) {
    std::string t = trim(reply);
    if (t.empty()) throw ScoreParseError("empty judge reply");
    std::size_t pos = 0;
    auto tok = next_token(t, pos);
    if (!tok || pos != t.size() || tok->negative ||
        !std::isdigit(static_cast<unsigned char>(t[0])))
        throw ScoreParseError("judge reply is not a bare number");
    if (tok->frac_digits > 3) throw ScoreParseError("judge reply has too many decimals");
    return check_range(*tok, exact_bound);
}

std::string parse_status_name(ParseStatus s) {
    switch (s) {
        case ParseStatus::ok: return "ok";
        case ParseStatus::retried_ok: return "retried_ok";
        case ParseStatus::failed: return "failed";
    }
    return "failed";
}

ParseStatus parse_status_from_name(const std::string& name) {
    if (name == "ok") return ParseStatus::ok;
    if (name == "retried_ok") return ParseStatus::retried_ok;
    return ParseStatus::failed;
}

JudgeScore judge_answer(modelclient::ChatTransport& transport,
                        const modelclient::ModelEndpointConfig& judge_cfg,
                        const std::string& question, const std::string& ground_truth,
                        const std::string& rag_answer) {
    std::string prompt = build_judge_prompt(question, ground_truth, rag_answer);
    modelclient::GenParams params;
    params.temperature = 0.0;
    params.max_new_tokens = 16;

    JudgeScore result;
    constexpr int kMaxAsks = 3;
    for (int ask = 1; ask <= kMaxAsks; ++ask) {
        auto rec = modelclient::generate(transport, judge_cfg, params, prompt);
        result.attempts = ask;
        if (rec.error) throw TransportError("judge call failed: " + *rec.error);
        result.raw_reply = rec.answer_text;
        try {
            bool bound = false;
            double value = ask == 1 ? parse_score_strict(rec.answer_text, &bound)
                                    : parse_score(rec.answer_text, &bound);
            result.value = value;
            result.parse_status = ask == 1 ? ParseStatus::ok : ParseStatus::retried_ok;
            if (bound)
                result.warning = "judge replied an exact bound: " + format_fixed(value, 3);
            return result;
        } catch (const ScoreParseError&) {
            // fall through to the next ask
        }
    }
    result.parse_status = ParseStatus::failed;
    result.value.reset();
    return result;
}

}  // namespace rageval::judge
