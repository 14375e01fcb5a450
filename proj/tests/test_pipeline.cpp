#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "vf/corpus.hpp"
#include "vf/net.hpp"
#include "vf/pipeline.hpp"
#include "vf/tokenize.hpp"

using namespace vf;

namespace {

MatrixRow make_row(double s, double r, double n, int points) {
    MatrixRow row;
    row.p[0] = s;
    row.p[1] = r;
    row.p[2] = n;
    row.points = points;
    return row;
}

ProbabilityMatrix random_matrix(std::mt19937_64& rng, std::size_t rows) {
    std::uniform_real_distribution<double> dist(0.01, 1.0);
    ProbabilityMatrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        double a = dist(rng), b = dist(rng), c = dist(rng);
        double sum = a + b + c;
        m.rows.push_back(make_row(a / sum, b / sum, c / sum, static_cast<int>(rng() % 16)));
    }
    return m;
}

EntailmentDistribution dist_of(double s, double r, double n) {
    EntailmentDistribution d;
    d.p_supports = s;
    d.p_refutes = r;
    d.p_nei = n;
    return d;
}

}  // namespace

TEST_CASE("merge_candidates joins presented texts with single spaces") {
    Candidate a, b;
    a.presented_text = "A b.";
    b.presented_text = "C d.";
    CHECK(merge_candidates({a, b}) == "A b. C d.");
    CHECK(merge_candidates({}) == "");
    // token count of the block is the sum of member token counts
    std::vector<Candidate> many;
    std::size_t token_sum = 0;
    for (int i = 0; i < 40; ++i) {
        Candidate c;
        c.presented_text = "Page " + std::to_string(i) + " says thing " + std::to_string(i) + ".";
        token_sum += tokenize(c.presented_text).size();
        many.push_back(c);
    }
    CHECK(tokenize(merge_candidates(many)).size() == token_sum);
}

TEST_CASE("dampen scales rows at or below the threshold") {
    ProbabilityMatrix m;
    m.rows.push_back(make_row(0.5, 0.3, 0.2, 11));
    m.rows.push_back(make_row(0.5, 0.3, 0.2, 12));
    ProbabilityMatrix out = dampen(m, 11, 0.3);
    CHECK(out.rows[0].p[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(out.rows[0].p[1] == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(out.rows[0].p[2] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(out.rows[0].dampened);
    CHECK(out.rows[1].p[0] == 0.5);
    CHECK(out.rows[1].p[1] == 0.3);
    CHECK(out.rows[1].p[2] == 0.2);
    CHECK_FALSE(out.rows[1].dampened);
}

TEST_CASE("dampened maxima separate from undampened maxima") {
    std::mt19937_64 rng(23);
    ProbabilityMatrix m = random_matrix(rng, 200);
    ProbabilityMatrix out = dampen(m, 11, 0.3);
    for (const auto& row : out.rows) {
        double mx = std::max({row.p[0], row.p[1], row.p[2]});
        if (row.dampened)
            CHECK(mx < 1.0 / 3.0);
        else
            CHECK(mx >= 1.0 / 3.0);
    }
}

TEST_CASE("decide follows the merge override") {
    ProbabilityMatrix m;
    m.rows.push_back(make_row(0.9, 0.05, 0.05, 15));  // matrix max in SUPPORTS
    auto [label, evidence] = decide(m, dist_of(0.1, 0.8, 0.1), true, 5);
    CHECK(label == Label::Refutes);
    // same matrix with --no-merge semantics: the matrix wins
    auto [label2, evidence2] = decide(m, dist_of(0.1, 0.8, 0.1), false, 5);
    CHECK(label2 == Label::Supports);
}

TEST_CASE("decide picks the global maximum column") {
    ProbabilityMatrix m;
    m.rows.push_back(make_row(0.1, 0.2, 0.7, 15));
    auto [label, evidence] = decide(m, dist_of(0.6, 0.2, 0.2), true, 5);
    CHECK(label == Label::Nei);
    REQUIRE(evidence.size() == 1);
    CHECK(evidence[0] == 0);
}

TEST_CASE("evidence is the top rows of the final label column") {
    ProbabilityMatrix m;
    double sup[] = {0.30, 0.90, 0.10, 0.50, 0.70, 0.20, 0.60};
    for (double s : sup) m.rows.push_back(make_row(s, (1 - s) / 2, (1 - s) / 2, 15));
    auto [label, evidence] = decide(m, dist_of(0.9, 0.05, 0.05), true, 5);
    CHECK(label == Label::Supports);
    CHECK(evidence == std::vector<std::uint32_t>{1, 4, 6, 3, 0});
}

TEST_CASE("evidence ties break toward earlier retrieval order") {
    ProbabilityMatrix m;
    for (int i = 0; i < 4; ++i) m.rows.push_back(make_row(0.5, 0.25, 0.25, 15));
    auto [label, evidence] = decide(m, dist_of(1, 0, 0), true, 5);
    CHECK(evidence == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("override dominance holds for random matrices") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        ProbabilityMatrix m = random_matrix(rng, 1 + rng() % 10);
        EntailmentDistribution merge = dist_of(0.2, 0.5, 0.3);
        auto [label, evidence] = decide(dampen(m), merge, true, 5);
        CHECK(label == Label::Refutes);
        CHECK(evidence.size() == std::min<std::size_t>(5, m.rows.size()));
    }
}

TEST_CASE("argmax is invariant to scaling every row uniformly") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        ProbabilityMatrix m = random_matrix(rng, 1 + rng() % 8);
        EntailmentDistribution merge = dist_of(0.5, 0.2, 0.3);
        auto [label1, ev1] = decide(m, merge, true, 5);
        ProbabilityMatrix scaled = m;
        for (auto& row : scaled.rows)
            for (double& v : row.p) v *= 2.5;
        auto [label2, ev2] = decide(scaled, merge, true, 5);
        CHECK(label1 == label2);
        CHECK(ev1 == ev2);
    }
}

TEST_CASE("decide requires at least one row") {
    ProbabilityMatrix empty;
    CHECK_THROWS(decide(empty, dist_of(1, 0, 0), true, 5));
}

TEST_CASE("verify_claim is deterministic and grounded in the candidate set") {
    IngestStats stats;
    auto docs = load_dump(std::string(VF_FIXTURE_DIR) + "/mini_dump.jsonl", stats);
    IndexedCorpus index = IndexedCorpus::build(std::move(docs));
    NetConfig config;
    config.embed_dim = 8;
    config.hidden_dim = 8;
    config.conv_channels = 4;
    config.enc_dim = 4;
    std::vector<std::string> vocab;
    for (const auto& doc : index.docs())
        for (const auto& t : doc.body_tokens) vocab.push_back(t);
    EntailmentNet model(config, vocab, 3);

    ClaimRecord claim;
    claim.id = 42;
    claim.claim = "Scotland is a country.";
    VerdictRecord v1 = verify_claim(claim, index, std::nullopt, model);
    VerdictRecord v2 = verify_claim(claim, index, std::nullopt, model);
    CHECK(v1.label == v2.label);
    REQUIRE(v1.evidence.size() == v2.evidence.size());
    for (std::size_t i = 0; i < v1.evidence.size(); ++i) {
        CHECK(v1.evidence[i].page_title_raw == v2.evidence[i].page_title_raw);
        CHECK(v1.evidence[i].sentence_index == v2.evidence[i].sentence_index);
    }
    CHECK(v1.n_candidates > 0);
    CHECK(v1.evidence.size() == std::min<std::size_t>(5, v1.n_candidates));

    ClaimRecord degenerate;
    degenerate.id = 43;
    degenerate.claim = "Xyzzyq plugh.";
    VerdictRecord none = verify_claim(degenerate, index, std::nullopt, model);
    CHECK(none.label == Label::Nei);
    CHECK(none.evidence.empty());
}
