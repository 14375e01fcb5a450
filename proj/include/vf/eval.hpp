#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vf/corpus.hpp"
#include "vf/label.hpp"
#include "vf/pipeline.hpp"

namespace vf {

struct EvalReport {
    double label_accuracy = 0.0;
    double evidence_recall = 0.0;
    double fever_score = 0.0;
    // rows = true labels, columns = predictions, order (SUP, REF, NEI)
    std::array<std::array<std::uint64_t, 3>, 3> confusion = {};
    std::size_t n_claims = 0;
};

// All metrics take id-aligned inputs; a gold id without a prediction is an
// error listing the missing ids.
double label_accuracy(const std::vector<VerdictRecord>& preds,
                      const std::vector<ClaimRecord>& gold);

// Over SUPPORTS/REFUTES gold claims only: fraction whose predicted evidence
// covers at least one full gold group.
double evidence_recall(const std::vector<VerdictRecord>& preds,
                       const std::vector<ClaimRecord>& gold);

// Label correct and (gold NEI, or a full gold group covered by the first 5
// predicted evidence entries).
double fever_score(const std::vector<VerdictRecord>& preds,
                   const std::vector<ClaimRecord>& gold);

std::array<std::array<std::uint64_t, 3>, 3> confusion_matrix(
    const std::vector<VerdictRecord>& preds, const std::vector<ClaimRecord>& gold);

EvalReport evaluate(const std::vector<VerdictRecord>& preds,
                    const std::vector<ClaimRecord>& gold);

// Verdict file: one JSON object per line with id, predicted_label,
// predicted_evidence.
void save_verdicts(const std::vector<VerdictRecord>& verdicts, const std::string& path);
std::vector<VerdictRecord> load_verdicts(const std::string& path);

void save_report(const EvalReport& report, const std::string& path);

}  // namespace vf
