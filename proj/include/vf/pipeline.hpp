#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vf/index.hpp"
#include "vf/keywords.hpp"
#include "vf/label.hpp"
#include "vf/net.hpp"
#include "vf/postags.hpp"

namespace vf {

struct MatrixRow {
    double p[3];           // SUPPORTS, REFUTES, NEI
    int points = 0;        // 0..15
    std::uint32_t doc_id = 0;
    bool dampened = false;
};

struct ProbabilityMatrix {
    std::vector<MatrixRow> rows;  // retrieval order
};

struct EvidenceRef {
    std::string page_title_raw;
    std::uint32_t sentence_index = 0;
};

struct VerdictRecord {
    std::int64_t claim_id = 0;
    Label label = Label::Nei;
    std::vector<EvidenceRef> evidence;  // at most 5
    EntailmentDistribution merge_dist;
    std::size_t n_candidates = 0;
};

struct PipelineOptions {
    int point_threshold = 11;
    double dampen_factor = 0.3;
    std::uint32_t type1_limit = 2;
    std::uint32_t type2_limit = 20;
    std::uint32_t type3_limit = 20;
    std::uint32_t max_evidence = 5;
    bool use_points = true;  // --no-points disables dampening
    bool use_merge = true;   // --no-merge disables the REFUTES override
};

std::string merge_candidates(const std::vector<Candidate>& candidates);

// Rows with point total <= threshold get all three probabilities scaled by
// `factor`; rows above the threshold are untouched.
ProbabilityMatrix dampen(ProbabilityMatrix matrix, int threshold = 11, double factor = 0.3);

std::pair<Label, std::vector<std::uint32_t>> decide(const ProbabilityMatrix& dampened,
                                                    const EntailmentDistribution& merge_dist,
                                                    bool use_merge = true,
                                                    std::uint32_t max_evidence = 5);

VerdictRecord verify_claim(const ClaimRecord& claim, const IndexedCorpus& index,
                           const std::optional<ClaimAnnotations>& annotations,
                           const EntailmentNet& model, const PipelineOptions& options = {});

}  // namespace vf
