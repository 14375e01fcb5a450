#include "vf/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "vf/tokenize.hpp"

namespace vf {

std::string merge_candidates(const std::vector<Candidate>& candidates) {
    std::string block;
    for (const auto& cand : candidates) {
        if (!block.empty()) block.push_back(' ');
        block += cand.presented_text;
    }
    return block;
}

ProbabilityMatrix dampen(ProbabilityMatrix matrix, int threshold, double factor) {
    for (auto& row : matrix.rows) {
        if (row.points > threshold) continue;
        for (double& v : row.p) v *= factor;
        row.dampened = true;
    }
    return matrix;
}

std::pair<Label, std::vector<std::uint32_t>> decide(const ProbabilityMatrix& dampened,
                                                    const EntailmentDistribution& merge_dist,
                                                    bool use_merge, std::uint32_t max_evidence) {
    if (dampened.rows.empty()) throw std::invalid_argument("decide needs at least one row");

    Label label;
    if (use_merge && merge_dist.argmax() == Label::Refutes) {
        label = Label::Refutes;
    } else {
        // global maximum cell; ties go to the earlier row, then to the
        // earlier column (SUPPORTS > REFUTES > NEI)
        std::size_t best_row = 0, best_col = 0;
        double best = dampened.rows[0].p[0];
        for (std::size_t r = 0; r < dampened.rows.size(); ++r)
            for (std::size_t c = 0; c < 3; ++c)
                if (dampened.rows[r].p[c] > best) {
                    best = dampened.rows[r].p[c];
                    best_row = r;
                    best_col = c;
                }
        (void)best_row;
        label = static_cast<Label>(best_col);
    }

    // top candidates by the final label's column, stable on retrieval order
    std::vector<std::uint32_t> order(dampened.rows.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t col = static_cast<std::size_t>(label);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return dampened.rows[a].p[col] > dampened.rows[b].p[col];
    });
    if (order.size() > max_evidence) order.resize(max_evidence);
    return {label, order};
}

VerdictRecord verify_claim(const ClaimRecord& claim, const IndexedCorpus& index,
                           const std::optional<ClaimAnnotations>& annotations,
                           const EntailmentNet& model, const PipelineOptions& options) {
    VerdictRecord verdict;
    verdict.claim_id = claim.id;

    KeywordSet keywords;
    try {
        keywords = extract(claim.claim, annotations);
    } catch (const std::invalid_argument&) {
        return verdict;  // empty claim: NEI, no evidence
    }
    std::vector<Query> queries = make_queries(keywords, options.type1_limit, options.type2_limit,
                                              options.type3_limit);
    std::vector<Candidate> candidates = collect_candidates(queries, index);
    verdict.n_candidates = candidates.size();
    if (candidates.empty()) return verdict;  // NEI with empty evidence

    std::vector<std::string> claim_tokens = tokenize(claim.claim);
    TaggedText claim_tags = tag(claim.claim);

    ProbabilityMatrix matrix;
    matrix.rows.reserve(candidates.size());
    for (const auto& cand : candidates) {
        MatrixRow row;
        row.doc_id = cand.doc_id;
        EntailmentDistribution dist =
            model.predict(tokenize(cand.presented_text), claim_tokens);
        row.p[0] = dist.p_supports;
        row.p[1] = dist.p_refutes;
        row.p[2] = dist.p_nei;
        row.points = score(claim_tags, tag(cand.presented_text)).total;
        matrix.rows.push_back(row);
    }

    if (options.use_merge) {
        std::string block = merge_candidates(candidates);
        verdict.merge_dist = model.predict(tokenize(block), claim_tokens);
    }

    if (options.use_points)
        matrix = dampen(std::move(matrix), options.point_threshold, options.dampen_factor);

    auto [label, evidence_rows] =
        decide(matrix, verdict.merge_dist, options.use_merge, options.max_evidence);
    verdict.label = label;
    for (std::uint32_t r : evidence_rows) {
        const SentenceDoc& doc = index.docs()[matrix.rows[r].doc_id];
        verdict.evidence.push_back({doc.page_title_raw, doc.sentence_index});
    }
    return verdict;
}

}  // namespace vf
