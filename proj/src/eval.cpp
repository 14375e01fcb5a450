#include "vf/eval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "vf/tokenize.hpp"

namespace vf {

namespace {

using nlohmann::json;

// id -> prediction, erroring on gold ids without predictions
std::unordered_map<std::int64_t, const VerdictRecord*> align(
    const std::vector<VerdictRecord>& preds, const std::vector<ClaimRecord>& gold) {
    std::unordered_map<std::int64_t, const VerdictRecord*> map;
    for (const auto& p : preds) map[p.claim_id] = &p;
    std::string missing;
    for (const auto& g : gold) {
        if (!map.count(g.id)) missing += (missing.empty() ? "" : ", ") + std::to_string(g.id);
    }
    if (!missing.empty())
        throw std::runtime_error("missing predictions for claim ids: " + missing);
    return map;
}

Label gold_label(const ClaimRecord& g) {
    auto label = label_from_string(g.label);
    if (!label) throw std::runtime_error("bad gold label for claim " + std::to_string(g.id));
    return *label;
}

bool covers_a_group(const VerdictRecord& pred, const ClaimRecord& g, std::size_t max_evidence) {
    std::set<std::pair<std::string, std::uint32_t>> predicted;
    for (std::size_t i = 0; i < pred.evidence.size() && i < max_evidence; ++i)
        predicted.emplace(pred.evidence[i].page_title_raw, pred.evidence[i].sentence_index);
    for (const auto& group : g.evidence_groups) {
        bool all = true;
        for (const auto& pair : group)
            if (!predicted.count(pair)) {
                all = false;
                break;
            }
        if (all && !group.empty()) return true;
    }
    return false;
}

}  // namespace

double label_accuracy(const std::vector<VerdictRecord>& preds,
                      const std::vector<ClaimRecord>& gold) {
    auto map = align(preds, gold);
    if (gold.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& g : gold)
        if (map.at(g.id)->label == gold_label(g)) ++correct;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double evidence_recall(const std::vector<VerdictRecord>& preds,
                       const std::vector<ClaimRecord>& gold) {
    auto map = align(preds, gold);
    std::size_t verifiable = 0, recalled = 0;
    for (const auto& g : gold) {
        if (gold_label(g) == Label::Nei) continue;
        ++verifiable;
        if (covers_a_group(*map.at(g.id), g, 5)) ++recalled;
    }
    if (verifiable == 0) return 0.0;
    return static_cast<double>(recalled) / static_cast<double>(verifiable);
}

double fever_score(const std::vector<VerdictRecord>& preds,
                   const std::vector<ClaimRecord>& gold) {
    auto map = align(preds, gold);
    if (gold.empty()) return 0.0;
    std::size_t scored = 0;
    for (const auto& g : gold) {
        const VerdictRecord& p = *map.at(g.id);
        Label truth = gold_label(g);
        if (p.label != truth) continue;
        if (truth == Label::Nei || covers_a_group(p, g, 5)) ++scored;
    }
    return static_cast<double>(scored) / static_cast<double>(gold.size());
}

std::array<std::array<std::uint64_t, 3>, 3> confusion_matrix(
    const std::vector<VerdictRecord>& preds, const std::vector<ClaimRecord>& gold) {
    auto map = align(preds, gold);
    std::array<std::array<std::uint64_t, 3>, 3> confusion = {};
    for (const auto& g : gold) {
        std::size_t row = static_cast<std::size_t>(gold_label(g));
        std::size_t col = static_cast<std::size_t>(map.at(g.id)->label);
        ++confusion[row][col];
    }
    return confusion;
}

EvalReport evaluate(const std::vector<VerdictRecord>& preds,
                    const std::vector<ClaimRecord>& gold) {
    EvalReport report;
    report.label_accuracy = label_accuracy(preds, gold);
    report.evidence_recall = evidence_recall(preds, gold);
    report.fever_score = fever_score(preds, gold);
    report.confusion = confusion_matrix(preds, gold);
    report.n_claims = gold.size();
    return report;
}

void save_verdicts(const std::vector<VerdictRecord>& verdicts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write verdict file: " + path);
    for (const auto& v : verdicts) {
        json j;
        j["id"] = v.claim_id;
        j["predicted_label"] = to_string(v.label);
        json ev = json::array();
        for (const auto& e : v.evidence) ev.push_back({e.page_title_raw, e.sentence_index});
        j["predicted_evidence"] = std::move(ev);
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("error writing verdict file: " + path);
}

std::vector<VerdictRecord> load_verdicts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open verdict file: " + path);
    std::vector<VerdictRecord> verdicts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw std::runtime_error("bad verdict record at line " + std::to_string(lineno));
        VerdictRecord v;
        v.claim_id = j.at("id").get<std::int64_t>();
        auto label = label_from_string(j.at("predicted_label").get<std::string>());
        if (!label)
            throw std::runtime_error("bad predicted label at line " + std::to_string(lineno));
        v.label = *label;
        for (const auto& e : j.at("predicted_evidence"))
            v.evidence.push_back({e.at(0).get<std::string>(), e.at(1).get<std::uint32_t>()});
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

void save_report(const EvalReport& report, const std::string& path) {
    json j;
    j["label_accuracy"] = report.label_accuracy;
    j["evidence_recall"] = report.evidence_recall;
    j["fever_score"] = report.fever_score;
    j["n_claims"] = report.n_claims;
    json confusion = json::array();
    for (const auto& row : report.confusion) confusion.push_back(row);
    j["confusion"] = std::move(confusion);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("error writing report file: " + path);
}

}  // namespace vf
