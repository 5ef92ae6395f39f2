// Built-in strategy registry. Bodies are stored byte-exact (no trailing
// newline); prompt golden tests pin every rendered form, so any edit here
// must be deliberate. Entries flagged `reconstructed` had gaps in their
// published form (elided examples, missing headings, nonstandard context
// placeholders) that were filled in or normalized by hand.
#include "rageval/templates.hpp"

#include "rageval/common.hpp"

namespace rageval::templates {

namespace {

using C = TemplateCategory;
using M = ContextMode;
using L = DocLabelStyle;

PromptTemplate make(std::string id, C category, M mode, L style, bool reconstructed,
                    std::string body) {
    PromptTemplate t;
    t.id = std::move(id);
    t.category = category;
    t.context_mode = mode;
    t.doc_label_style = style;
    t.reconstructed = reconstructed;
    t.body = std::move(body);
    return t;
}

std::vector<PromptTemplate> build_registry() {
    std::vector<PromptTemplate> r;
    r.reserve(24);

    // ---------- baseline ----------

    r.push_back(make("standard_context_aware", C::baseline, M::monolithic, L::doc_bracket, false,
                     R"tpl(Context: {context}
Question: {question}
Answer:)tpl"));

    // ---------- foundational ----------

    r.push_back(make("instruction_tuned", C::foundational, M::monolithic, L::doc_bracket, false,
                     R"tpl(Use the provided context to answer the question. Do not use any other knowledge.

Context: {context}
Question: {question}
Answer:)tpl"));

    r.push_back(make("role_playing", C::foundational, M::monolithic, L::doc_bracket, false,
                     R"tpl(You are an expert researcher and analyst. Based ONLY on the retrieved documents below, explain the answer to the following question.

Context: {context}
Question: {question}
Answer:)tpl"));

    // ---------- reasoning ----------

    r.push_back(make("chain_of_thought", C::reasoning, M::monolithic, L::doc_bracket, false,
                     R"tpl(Based on the context, answer the following question. First, think step by step to break down your reasoning. Then, provide the final answer.

Context: {context}
Question: {question}
Answer:
Step-by-step reasoning:
1.
2.
Final Answer:)tpl"));

    r.push_back(make("least_to_most", C::reasoning, M::monolithic, L::doc_bracket, false,
                     R"tpl(To answer the main question, we must first answer a series of sub-questions based on the provided context.

Context: {context}
Question: {question}

Decompose the question into sub-questions and answer them.

Sub-question 1: [Generate and answer sub-question 1]
Sub-question 2: [Generate and answer sub-question 2]
...

Therefore, the final answer to the main question is:)tpl"));

    // ---------- self-correction ----------

    r.push_back(make("self_refine", C::self_correction, M::monolithic, L::doc_bracket, false,
                     R"tpl(Your task is to answer the question based on the context in a two-step process.

Context: {context}
Question: {question}

First, produce a draft answer.
Draft Answer:

Second, critique the draft answer for accuracy and completeness based on the context. Then, provide the final, refined answer.
Refined Answer:)tpl"));

    r.push_back(make("chain_of_verification", C::self_correction, M::monolithic, L::doc_bracket,
                     false,
                     R"tpl(Answer the following question based on the context.

1. First, generate a baseline answer.
2. Next, break down the baseline answer into individual verification-worthy claims.
3. For each claim, check if it is supported by the context.
4. Finally, generate a final, verified answer based on the verified claims.

Context: {context}
Question: {question}
Response:)tpl"));

    // ---------- advanced ----------

    r.push_back(make("few_shot_exemplar", C::advanced, M::monolithic, L::doc_bracket, false,
                     R"tpl(Here are some examples of how to answer questions based on context:

Example 1:
Context: The study shows that exercise improves cognitive function.
Question: What does exercise do to cognitive function?
Answer: According to the context, exercise improves cognitive function.

Example 2:
Context: Machine learning models require large datasets for training.
Question: What do ML models need for training?
Answer: Based on the context, machine learning models require large datasets for training.

Now answer this question:

Context: {context}
Question: {question}
Answer:)tpl"));

    r.push_back(make("hierarchical_synthesis", C::advanced, M::enumerated, L::doc_bracket, false,
                     R"tpl(You have been provided with multiple documents. Your task is to synthesize the information from these documents to answer the question. When you use information from a document, cite it using its identifier.

Context:
{documents}

Question: {question}
Answer (with citations):)tpl"));

    r.push_back(make("structured_json", C::advanced, M::monolithic, L::doc_bracket, false,
                     R"tpl(Based on the context, extract the required information and format it as a JSON object. The JSON object must have the following keys: "answer", "confidence_score", "supporting_evidence".

Context: {context}
Question: {question}
JSON Response:)tpl"));

    // ---------- hybrid ----------

    r.push_back(make("expert_cross_examination_synthesis_prompting", C::hybrid, M::enumerated,
                     L::doc_bracket, true,
                     R"tpl(You are an expert researcher and analyst conducting a rigorous cross-examination of evidence to answer research questions. Always reference specific documents using their identifiers [DOC-X] when making any claim.

Examples of Expert Cross-Examination:

Example:
Documents:
[DOC-1] The city council approved the new transit plan in March.
[DOC-2] The transit plan, approved earlier this year, will add four bus lines.
Question: How many bus lines will the plan approved in March add?
Expert Cross-Examination:
Evidence Examination: [DOC-1] establishes the plan was approved in March; [DOC-2] states the approved plan adds four bus lines.
Cross-Examination: The two documents describe the same plan and do not conflict.
Synthesis: Linking the approval date [DOC-1] to the plan's scope [DOC-2] identifies the answer.
Verdict: The plan adds four bus lines [DOC-1][DOC-2].

Now conduct your expert cross-examination:

Documents:
{documents}

Question: {question}

Expert Cross-Examination:
Evidence Examination:
[Examine each document critically and cite using [DOC-X] format]

Cross-Examination:
[Identify contradictions, assess reliability, weigh evidence strength - always cite sources]

Synthesis:
[Integrate information across all documents with proper citations, showing how they connect or conflict]

Verdict:
[Final conclusion based on synthesized evidence with clear document citations])tpl"));

    r.push_back(make("adaptive_hybrid_prompting", C::hybrid, M::enumerated, L::doc_bracket, true,
                     R"tpl(You are a versatile expert analyst. Adapt your reasoning strategy to the question before answering, using ONLY the documents below.

Documents:
{documents}

Question: {question}

Adaptive Procedure:

Step 1 - Assess: Classify the question (single fact, bridge across documents, comparison, or aggregation) and note which documents are relevant.

Step 2 - Select Strategy: Choose the reasoning approach that fits the assessment: direct lookup for single facts, step-by-step chaining for bridge questions, side-by-side extraction for comparisons, or systematic enumeration for aggregation.

Step 3 - Execute: Apply the selected strategy, citing every fact as [DOC-X].

Step 4 - Verify: Check the result against the documents; revise any claim that is unsupported.

Step 5 - Answer: State the final answer with citations.

Assessment:

Selected Strategy:

Reasoning:

Final Answer:)tpl"));

    r.push_back(make("hybrid_focused_prompting", C::hybrid, M::monolithic, L::doc_bracket, false,
                     R"tpl(You are an expert researcher conducting an in-depth analysis. Demonstrate both analytical rigor and creative scientific thinking.

Context: {context}
Question: {question}

Analytical Framework:

Step 1 - Evidence Extraction:
What specific facts, data, and findings are presented?

Step 2 - Mechanistic Reasoning:
What underlying processes or principles explain these findings?

Step 3 - Critical Assessment:
How reliable and complete is this evidence? What are the limitations?

Step 4 - Creative Synthesis:
What novel insights, connections, or implications can be drawn?

Step 5 - Expert Conclusion:
Based on this analysis, what is your definitive, evidence-based answer?

Provide your response following this framework, showing your reasoning process while delivering a clear, scientifically sound conclusion:)tpl"));

    r.push_back(make("hybrid_scientific_prompting", C::hybrid, M::enumerated, L::doc_bracket, true,
                     R"tpl(You are a senior research scientist known for rigorous analysis and creative insights. Your task is to provide a comprehensive, evidence-based response that demonstrates both analytical depth and scientific creativity.
Ground every claim in the research context below; do not draw on outside knowledge.

Research Context:
{documents}

Research Question: {question}

Analysis Approach:
Follow this systematic framework to ensure thorough analysis:

1. Initial Assessment: What are the key findings and data points?
2. Pattern Recognition: What relationships, trends, or mechanisms can be identified?
3. Cross-Source Synthesis (if multiple sources): How do findings complement, contradict, or extend each other?
4. Critical Evaluation: What are the strengths and limitations of the evidence?
5. Creative Integration: What novel insights or unexpected connections emerge?
6. Scientific Conclusion: What definitive answer can be supported by the evidence?

Expert Analysis:)tpl"));

    r.push_back(make("hybrid_scientific_synthesis_prompting", C::hybrid, M::enumerated,
                     L::doc_bracket, true,
                     R"tpl(You are an expert scientific researcher and analyst, specializing in evidence-based synthesis. Your role is to answer questions ONLY based on the provided documents, without external knowledge. Use a multi-step process:

1. Summarize each document briefly, highlighting key facts.
2. Use few-shot examples to guide your reasoning:
Example: If documents state a discovery date [DOC-1] and the discoverer's nationality [DOC-2], a question about when the discoverer's country first observed it is answered by combining both facts, citing each document.
3. Break down the question step-by-step (Chain-of-Thought): Identify sub-questions, answer them from documents, and cite [DOC-X].
4. Draft an initial answer.
5. Self-refine: Critique the draft for accuracy, completeness, and potential biases based on documents. If insufficient evidence, state 'Insufficient evidence' and suggest refinements.
6. Provide the final synthesized answer with citations.

Context:
{documents}

Question: {question}

Document Summaries:
[DOC-1]: ...
[DOC-2]: ...

Step-by-Step Reasoning (with sub-questions):

Draft Answer:

Self-Critique:

Final Answer (with citations):)tpl"));

    r.push_back(make("expert_synthesis_prompting", C::hybrid, M::enumerated, L::doc_bracket, true,
                     R"tpl(You are a meticulous and expert research assistant. Your primary goal is to provide accurate, comprehensive, and evidence-based answers by synthesizing information from the provided documents.

Core Principles:

1. Synthesize, Don't Summarize: Combine facts from multiple documents into one integrated answer instead of restating each document separately.
2. Cite Everything: Attach a [DOC-X] identifier to every factual claim you make.
3. Address Contradictions: When documents disagree, say so explicitly and cite both sides.
4. Direct Answer First: Open with the direct answer to the question, then present the supporting synthesis.

Example Task:

Provided Documents:
[DOC-1] The observatory was completed in 1897 on Mount Hamilton.
[DOC-2] Mount Hamilton lies east of San Jose, California.
Question: In which state is the observatory completed in 1897 located?
Answer: California [DOC-1][DOC-2]. The observatory was completed in 1897 on Mount Hamilton [DOC-1], and Mount Hamilton lies east of San Jose, California [DOC-2].

Your Task:

Provided Documents:
{documents}

Question: {question}

Answer:)tpl"));

    r.push_back(make("expert_hierarchical_self_refine_prompting", C::hybrid, M::enumerated,
                     L::doc_bracket, true,
                     R"tpl(You are an expert and precise analyst. Use ONLY the documents below.

Rules:
- For every claim, cite its source immediately using [DOC-i].
- If the context is insufficient, output "INSUFFICIENT_CONTEXT".
- Do not use outside knowledge. Do not invent claims. Prefer short direct quotes.

Context:
{documents}

Question: {question}

Your output must follow this structure:

Draft (expert's initial answer):
- Answer (2-4 sentences, with [DOC-i] citations):
<initial expert answer with citations>
- Key evidence (2-4 short quotes):
- "..." [DOC-?]
- "..." [DOC-?]

Self-Review (same expert reviews their draft):
- Gaps/Risks (max 3 items; for each, specify which part of the draft and which document(s) are relevant):
1) <gap/risk> - related to: <draft section> - evidence: [DOC-?]
...
- Fixes (max 3 items; specify exactly what to add/remove and which document supports it):
1) <fix action> - supported by: [DOC-?]
...

Final (refined version after applying fixes):
- Answer (3-6 sentences, precise and concise, with [DOC-i] citation on each factual claim):
<final expert answer with citations>
- Confidence: <High|Medium|Low> - one-line justification based on the documents [DOC-?])tpl"));

    r.push_back(make("optimized_multi_hop_prompting", C::hybrid, M::enumerated, L::doc_bracket,
                     true,
                     R"tpl(You are a precision-focused answer engine designed for multi-hop reasoning and rigorous evidence citation.

Critical Instructions:
1) Identify the 2-3 most essential documents needed for this multi-hop question.
2) Extract only the key facts from those documents that bear on the question.
3) Chain the facts step by step; every hop must be supported by a cited document.
4) Cite the source of every fact as [DOC-X] immediately after the fact.
5) Do not use any knowledge beyond the documents.
6) If the documents do not contain enough evidence, answer exactly "Insufficient evidence".
7) Keep the reasoning compact; no filler text.
8) End with a single definitive answer sentence that includes all required citations.

Documents:
{documents}

Question: {question}

Thinking Process:
Step 1: Document selection - identify which documents are essential and why.
Step 2: Fact extraction - list the key facts from the selected documents with citations.
Step 3: Reasoning linkage - connect the facts into a reasoning chain across documents.
Step 4: Synthesis - combine the linked facts into a candidate answer.
Step 5: Validation - confirm every claim in the candidate answer is cited and supported.

Explanation:
1) Document Selection:
2) Key Facts Extracted:
3) Multi-hop Reasoning:
4) Synthetic Integration:

Answer (must include all facts with [DOC-X] citations):)tpl"));

    r.push_back(make("multi_hop_decomposition_prompting", C::hybrid, M::enumerated, L::doc_bracket,
                     false,
                     R"tpl(You are an expert in multi-hop reasoning.

You have the following documents:
{documents}

Main Question:
{question}

Instructions:
1. Decompose: First, break the main question into clear sub-questions.
2. Answer Sub-Questions: For each sub-question, find the answer in the documents and cite every fact as [DOC-x].
3. Synthesize: Combine the sub-answers into one coherent final answer. Cite the documents that support each part.
4. Output Format:

Sub-questions:
1) ...
2) ...

Sub-answers:
1) ... [DOC-?]
2) ... [DOC-?]

Final Answer:
...

Be concise, precise, and never invent facts. Rely strictly on the provided documents.)tpl"));

    r.push_back(make("optimized_multihop_3b_prompting", C::hybrid, M::enumerated, L::doc_bracket,
                     true,
                     R"tpl(Answer the question using ONLY the provided documents. For questions needing information from multiple documents, work step-by-step.

Multi-Hop Examples:

Example:
Documents:
[DOC-1] The bridge was designed by the engineer Clara Voss.
[DOC-2] Clara Voss was born in Rotterdam.
Question: Where was the designer of the bridge born?
Step-by-step: The bridge's designer is Clara Voss [DOC-1]. Clara Voss was born in Rotterdam [DOC-2].
Final Answer: Rotterdam [DOC-1][DOC-2].

Your Task:

Documents:
{documents}

Question: {question}

Step-by-Step-Reasoning:

Step 1: What information do I need to answer this question?

Step 2: Find relevant facts from each document:

Step 3: How do these facts connect to answer the question?

Step 4: Combine the facts for the final answer:

Final Answer: [Provide clear answer with [DOC-X] citations])tpl"));

    r.push_back(make("slm_hotpot_smec", C::hybrid, M::enumerated, L::d_bracket, true,
                     R"tpl(You are an evidence-bound assistant. Use ONLY the Documents below. No outside knowledge.

Task: For the multi-hop question, extract the minimum bridging facts and return a short, normalized final answer.

Output (exactly these sections):

Findings:
- <fact> - "<short quote>" [D#]
...

Reasoning: <one short sentence combining the findings>

Final_Answer: <only the final answer, normalized>

Normalization rules:
- Strip articles and trailing punctuation; keep the canonical surface form from the documents.
- Dates as YYYY or YYYY-MM-DD exactly as written; numbers as plain digits.
- For yes/no questions answer exactly "yes" or "no".

Constraints:
- At most 3 findings; one quote per finding, under 15 words each.
- The Reasoning line must be a single sentence.
- Final_Answer must contain the answer only: no citations, no explanation.

Documents:
{documents}

Question: {question}

Begin.)tpl"));

    r.push_back(make("multi_hop_chain_prompting", C::hybrid, M::enumerated, L::doc_plain, false,
                     R"tpl(Documents:
{documents}

Question: {question}

Find the answer by connecting information:

First fact: (What relevant fact from Doc1 or Doc2?)
→ Leads to: (What does this tell us?)
→ Combined with: (What other fact connects?)
→ Therefore: (Final answer)

Answer with citations [Doc1], [Doc2]:)tpl"));

    r.push_back(make("multi_hop_compact_prompting", C::hybrid, M::enumerated, L::num_bracket,
                     false,
                     R"tpl(Answer the question using ONLY the given documents. Connect information across documents.

Documents:
{documents}

Question: {question}

Instructions:
1. Find relevant facts in each document
2. Connect facts to answer the question
3. Cite sources using [1], [2], etc.

Step 1 - Key facts:
- From [1]:
- From [2]:
- (continue as needed)

Step 2 - Connect facts:
(Show how facts relate)

Answer: (Complete answer with citations))tpl"));

    r.push_back(make("optimized_multi_hop_slm", C::hybrid, M::enumerated, L::doc_bracket, true,
                     R"tpl(You are an expert analyst answering multi-hop questions ONLY from the provided documents. Cite every fact with [DOC-X]. If evidence is missing, say 'Insufficient evidence'.

Quick Examples (Learn from these):

Example:
Documents:
[DOC-1] The festival takes place in Ghent.
[DOC-2] Ghent is a city in Belgium.
Question: In which country does the festival take place?
Response: The festival takes place in Ghent [DOC-1], which is in Belgium [DOC-2]. Final Answer: Belgium [DOC-1][DOC-2].

Your Task - Follow These Steps Exactly:

1. Break Down Question: Split the question into the facts you must find.
2. Synthesize Evidence: Collect the relevant facts from the documents with [DOC-X] citations.
3. Draft Answer: Write a short draft answer from the evidence.
4. Quick Self-Refine: Check the draft against the documents and fix any unsupported claim.
5. Final Answer: State the final answer with citations.

Documents:
{documents}

Question: {question}

Your Response (use the steps):)tpl"));

    for (const auto& tpl : r) validate_template(tpl);
    return r;
}

}  // namespace

const std::vector<PromptTemplate>& registry() {
    static const std::vector<PromptTemplate> r = build_registry();
    return r;
}

}  // namespace rageval::templates
