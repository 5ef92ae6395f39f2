#include "rageval/corpus.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rageval/common.hpp"

namespace rageval::corpus {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownFields = {"id", "question", "ground_truth", "documents"};

std::string line_tag(std::size_t line_no) {
    return "line " + std::to_string(line_no);
}

QaInstance parse_instance(const json& obj, std::size_t line_no, std::size_t& warning_count) {
    if (!obj.is_object()) throw DatasetError(line_tag(line_no) + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (kKnownFields.find(key) == kKnownFields.end()) ++warning_count;
    }
    QaInstance inst;
    if (obj.contains("id")) {
        if (!obj["id"].is_string())
            throw DatasetError(line_tag(line_no) + ": id must be a string");
        inst.id = trim(obj["id"].get<std::string>());
        if (inst.id.empty()) throw DatasetError(line_tag(line_no) + ": id is empty");
    } else {
        inst.id = "row-" + std::to_string(line_no);
    }
    for (const char* field : {"question", "ground_truth"}) {
        if (!obj.contains(field) || !obj[field].is_string())
            throw DatasetError(line_tag(line_no) + ": missing string field '" + field + "'");
    }
    inst.question = trim(obj["question"].get<std::string>());
    inst.ground_truth = trim(obj["ground_truth"].get<std::string>());
    if (inst.question.empty()) throw DatasetError(line_tag(line_no) + ": question is empty");
    if (inst.ground_truth.empty())
        throw DatasetError(line_tag(line_no) + ": ground_truth is empty");
    if (!obj.contains("documents") || !obj["documents"].is_array())
        throw DatasetError(line_tag(line_no) + ": missing array field 'documents'");
    for (const auto& doc : obj["documents"]) {
        if (!doc.is_string())
            throw DatasetError(line_tag(line_no) + ": documents must all be strings");
        std::string text = trim(doc.get<std::string>());
        if (text.empty())
            throw DatasetError(line_tag(line_no) + ": documents must not be blank");
        inst.documents.push_back(std::move(text));
    }
    if (inst.documents.empty())
        throw DatasetError(line_tag(line_no) + ": documents must not be empty");
    return inst;
}

}  // namespace

Dataset load_dataset(const std::string& path, std::optional<std::size_t> limit) {
    if (limit && *limit == 0) throw ConfigError("limit must be > 0 when given");
    std::string raw = read_file(path);

    Dataset ds;
    ds.manifest.source_path = path;
    ds.manifest.content_digest = content_digest(raw);

    std::set<std::string> seen_ids;
    std::istringstream in(normalize_newlines(raw));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw DatasetError(line_tag(line_no) + ": invalid JSON: " + e.what());
        }
        QaInstance inst = parse_instance(obj, line_no, ds.manifest.warning_count);
        if (!seen_ids.insert(inst.id).second)
            throw DatasetError(line_tag(line_no) + ": duplicate id '" + inst.id + "'");
        ds.instances.push_back(std::move(inst));
    }
    if (ds.instances.empty()) throw DatasetError("dataset has no instances: " + path);

    if (limit && *limit < ds.instances.size()) ds.instances.resize(*limit);
    ds.manifest.instance_count = ds.instances.size();
    return ds;
}

std::string to_jsonl(const std::vector<QaInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        json obj;
        obj["id"] = inst.id;
        obj["question"] = inst.question;
        obj["ground_truth"] = inst.ground_truth;
        obj["documents"] = inst.documents;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void write_dataset(const std::string& path, const std::vector<QaInstance>& instances) {
    write_file(path, to_jsonl(instances));
}

std::vector<QaInstance> sample_instances(const std::vector<QaInstance>& instances, std::size_t n,
                                         std::uint64_t seed) {
    if (n >= instances.size()) return instances;
    // Hand-rolled Fisher-Yates over indices: std::uniform_int_distribution is
    // not guaranteed to produce identical draws across standard libraries, and
    // sampled ids are pinned by golden tests.
    std::vector<std::size_t> idx(instances.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t remaining = idx.size() - i;
        std::size_t j = i + static_cast<std::size_t>(rng() % remaining);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());  // selection is random, order stays file order
    std::vector<QaInstance> out;
    out.reserve(n);
    for (std::size_t i : idx) out.push_back(instances[i]);
    return out;
}

}  // namespace rageval::corpus
