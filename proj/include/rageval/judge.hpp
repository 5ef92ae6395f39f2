/// @file judge.hpp
/// @brief LLM-as-a-judge scoring protocol.
///
/// A judge model receives the question, the reference answer and the
/// generated answer inside a fixed evaluation prompt and must reply with a
/// single number in [0, 1]. The number is defined as a weighted sum over
/// five quality dimensions; the weights live here so offline recomputation
/// matches what the prompt asks the judge to do.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "rageval/common.hpp"
#include "rageval/modelclient.hpp"

namespace rageval::judge {

/// Per-dimension weights, validated to be positive and to sum to 1.
struct WeightProfile {
    std::map<std::string, double> weights;

    /// Throws ConfigError on empty/negative/badly-summed weights.
    void validate() const;
};

/// The shipped protocol: semantic_alignment 0.35, information_accuracy 0.25,
/// logical_coherence 0.20, response_completeness 0.15, practical_utility 0.05.
const WeightProfile& default_weight_profile();

using DimensionScores = std::map<std::string, double>;

/// Sum of weight * score over the profile's dimensions. Throws ConfigError
/// when a weighted dimension is missing from `scores` or a score leaves
/// [0, 1]. Guaranteed inside [0, 1]; equal per-dimension scores s map to s.
double weighted_sum(const DimensionScores& scores, const WeightProfile& profile);

/// Deterministic evaluation prompt. Throws ConfigError on empty inputs.
/// Contains no unresolved placeholders and ends with the numeric-answer cue.
std::string build_judge_prompt(const std::string& question, const std::string& ground_truth,
                               const std::string& rag_answer);

class ScoreParseError : public Error {
public:
    using Error::Error;
};

/// Lenient reply parsing: the first numeric token ([0-9]+ optionally followed
/// by '.' and 1-3 digits) decides. A first token outside [0, 1] is an error,
/// not something to skip past. Tokens with more than 3 decimals are ignored;
/// the protocol asks for two decimal places, so long float dumps are noise.
double parse_score(const std::string& reply, bool* exact_bound = nullptr);

/// Strict form: the whole trimmed reply must be one numeric token.
double parse_score_strict(const std::string& reply, bool* exact_bound = nullptr);

enum class ParseStatus { ok, retried_ok, failed };

struct JudgeScore {
    std::optional<double> value;  // absent iff parse_status == failed
    std::string raw_reply;        // final reply verbatim
    ParseStatus parse_status = ParseStatus::failed;
    int attempts = 0;
    std::optional<std::string> warning;  // e.g. judge replied exactly 0 or 1
};

std::string parse_status_name(ParseStatus s);
ParseStatus parse_status_from_name(const std::string& name);

/// Asks the judge up to 3 times: the first reply is parsed strictly, the
/// re-asks leniently. Transport-level failures propagate as TransportError;
/// only unparseable replies burn attempts.
JudgeScore judge_answer(modelclient::ChatTransport& transport,
                        const modelclient::ModelEndpointConfig& judge_cfg,
                        const std::string& question, const std::string& ground_truth,
                        const std::string& rag_answer);

}  // namespace rageval::judge
