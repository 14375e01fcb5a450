#include <cstdio>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "vf/corpus.hpp"
#include "vf/eval.hpp"
#include "vf/index.hpp"
#include "vf/kernels.hpp"
#include "vf/net.hpp"
#include "vf/pipeline.hpp"

namespace {

struct CommonOpts {
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

int run_index(const std::string& dump_path, const std::string& index_path) {
    vf::IngestStats stats;
    std::vector<vf::SentenceDoc> docs = vf::load_dump(dump_path, stats);
    vf::IndexedCorpus index = vf::IndexedCorpus::build(std::move(docs));
    index.save(index_path);
    std::printf("pages: %zu\nsentences: %zu\ndropped: %zu\nmalformed records: %zu\n",
                stats.pages, stats.sentences_kept, stats.sentences_dropped,
                stats.malformed_records + stats.malformed_rows);
    return 0;
}

int run_predict(const std::string& index_path, const std::string& model_path,
                const std::string& claims_path, const std::string& annotations_path,
                const std::string& output_path, const vf::PipelineOptions& options,
                const CommonOpts& common) {
    vf::IndexedCorpus index = vf::IndexedCorpus::load(index_path);
    vf::EntailmentNet model = vf::EntailmentNet::load(model_path);
    std::vector<vf::ClaimRecord> claims = vf::load_claims(claims_path);
    vf::AnnotationStore annotations;
    if (!annotations_path.empty()) annotations = vf::AnnotationStore::load(annotations_path);

    std::vector<vf::VerdictRecord> verdicts(claims.size());
    auto work = [&](unsigned worker, unsigned stride) {
        for (std::size_t i = worker; i < claims.size(); i += stride)
            verdicts[i] = vf::verify_claim(claims[i], index, annotations.find(claims[i].id),
                                           model, options);
    };
    unsigned workers = std::max(1u, common.workers);
    if (workers == 1 || claims.size() < 2) {
        work(0, 1);
    } else {
        workers = std::min<unsigned>(workers, static_cast<unsigned>(claims.size()));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }
    vf::save_verdicts(verdicts, output_path);
    std::printf("claims: %zu\nverdicts written: %s\n", claims.size(), output_path.c_str());
    return 0;
}

int run_evaluate(const std::string& verdicts_path, const std::string& gold_path,
                 const std::string& report_path) {
    std::vector<vf::VerdictRecord> verdicts = vf::load_verdicts(verdicts_path);
    std::vector<vf::ClaimRecord> gold = vf::load_claims(gold_path);
    vf::EvalReport report = vf::evaluate(verdicts, gold);
    if (!report_path.empty()) vf::save_report(report, report_path);
    std::printf("Label %.4f  Recall %.4f  Score %.4f\n", report.label_accuracy,
                report.evidence_recall, report.fever_score);
    std::printf("confusion (rows true, cols predicted; SUP REF NEI):\n");
    for (const auto& row : report.confusion)
        std::printf("  %6llu %6llu %6llu\n", static_cast<unsigned long long>(row[0]),
                    static_cast<unsigned long long>(row[1]),
                    static_cast<unsigned long long>(row[2]));
    return 0;
}

int run_train(const std::string& pairs_path, const std::string& nei_claims_path,
              const std::string& index_path, const std::string& model_path,
              const vf::NetConfig& config, const vf::TrainOptions& options) {
    std::vector<vf::TrainingPair> pairs = vf::load_training_pairs(pairs_path);
    if (!nei_claims_path.empty()) {
        if (index_path.empty())
            throw std::runtime_error("--nei-claims requires --index for premise sampling");
        vf::IndexedCorpus index = vf::IndexedCorpus::load(index_path);
        std::vector<std::string> nei_claims;
        for (const auto& claim : vf::load_claims(nei_claims_path))
            if (claim.label == "NOT ENOUGH INFO") nei_claims.push_back(claim.claim);
        auto nei_pairs = vf::generate_nei_pairs(nei_claims, index, options.seed);
        pairs.insert(pairs.end(), nei_pairs.begin(), nei_pairs.end());
    }
    if (pairs.empty()) throw std::runtime_error("no training pairs");
    vf::EntailmentNet net = vf::train_new(config, pairs, options);
    double final_loss = 0.0;
    for (const auto& pair : pairs) final_loss += net.loss(pair);
    net.save(model_path);
    std::printf("pairs: %zu\nfinal mean loss: %.6f\nmodel written: %s\n", pairs.size(),
                final_loss / static_cast<double>(pairs.size()), model_path.c_str());
    return 0;
}

int run_gradcheck(const vf::NetConfig& config, std::uint64_t seed, double epsilon,
                  unsigned draws) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (unsigned d = 0; d < draws; ++d) {
        std::vector<std::string> vocab;
        for (int i = 0; i < 24; ++i) vocab.push_back("w" + std::to_string(i));
        vf::EntailmentNet net(config, vocab, rng());
        // alternate between the conv-active and conv-gated length regimes
        std::uniform_int_distribution<std::size_t> long_len(12, 15), short_len(2, 11);
        std::size_t m = d % 2 == 0 ? long_len(rng) : short_len(rng);
        std::size_t n = long_len(rng);
        vf::TrainingPair pair;
        std::uniform_int_distribution<int> pick(0, 23);
        for (std::size_t i = 0; i < m; ++i) pair.premise.push_back("w" + std::to_string(pick(rng)));
        for (std::size_t j = 0; j < n; ++j)
            pair.hypothesis.push_back("w" + std::to_string(pick(rng)));
        pair.label = static_cast<vf::Label>(d % 3);
        double err = vf::gradient_check(net, pair, epsilon);
        worst = std::max(worst, err);
        std::printf("draw %2u: m=%zu n=%zu max rel err %.3e\n", d, m, n, err);
    }
    std::printf("worst: %.3e (kernel variant: %s)\n", worst, vf::kern::active_variant().c_str());
    return worst < 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Claim verification over a Wikipedia-style corpus"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config");

    CommonOpts common;
    app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    app.add_option("--workers", common.workers, "per-claim parallelism")->capture_default_str();

    vf::PipelineOptions popts;
    vf::NetConfig nconf;
    vf::TrainOptions topts;

    std::string dump_path, index_path, model_path, claims_path, annotations_path;
    std::string output_path, verdicts_path, gold_path, report_path, pairs_path, nei_claims_path;

    auto* cmd_index = app.add_subcommand("index", "build the sentence index from a dump file");
    cmd_index->add_option("--dump", dump_path, "wiki dump (jsonl)")->required();
    cmd_index->add_option("--output", index_path, "index output file")->required();

    auto* cmd_predict = app.add_subcommand("predict", "verify claims and write verdicts");
    cmd_predict->add_option("--index", index_path)->required();
    cmd_predict->add_option("--model", model_path)->required();
    cmd_predict->add_option("--claims", claims_path)->required();
    cmd_predict->add_option("--annotations", annotations_path, "annotation sidecar (jsonl)");
    cmd_predict->add_option("--output", output_path)->required();
    cmd_predict->add_option("--point-threshold", popts.point_threshold)->capture_default_str();
    cmd_predict->add_option("--dampen-factor", popts.dampen_factor)->capture_default_str();
    cmd_predict->add_option("--type1-limit", popts.type1_limit)->capture_default_str();
    cmd_predict->add_option("--type2-limit", popts.type2_limit)->capture_default_str();
    cmd_predict->add_option("--type3-limit", popts.type3_limit)->capture_default_str();
    cmd_predict->add_option("--max-evidence", popts.max_evidence)->capture_default_str();
    cmd_predict->add_flag("--no-points", [&popts](std::int64_t) { popts.use_points = false; },
                          "disable point-score dampening");
    cmd_predict->add_flag("--no-merge", [&popts](std::int64_t) { popts.use_merge = false; },
                          "disable the merged-block REFUTES override");

    auto* cmd_evaluate = app.add_subcommand("evaluate", "score verdicts against gold claims");
    cmd_evaluate->add_option("--verdicts", verdicts_path)->required();
    cmd_evaluate->add_option("--gold", gold_path)->required();
    cmd_evaluate->add_option("--report", report_path, "JSON report output");

    auto* cmd_train = app.add_subcommand("train", "train the entailment model");
    cmd_train->add_option("--pairs", pairs_path, "training pairs (jsonl)")->required();
    cmd_train->add_option("--nei-claims", nei_claims_path,
                          "claim file whose NEI claims get generated premises");
    cmd_train->add_option("--index", index_path, "index used for NEI premise sampling");
    cmd_train->add_option("--output", model_path)->required();
    cmd_train->add_option("--embed-dim", nconf.embed_dim)->capture_default_str();
    cmd_train->add_option("--hidden-dim", nconf.hidden_dim)->capture_default_str();
    cmd_train->add_option("--conv-channels", nconf.conv_channels)->capture_default_str();
    cmd_train->add_option("--enc-dim", nconf.enc_dim)->capture_default_str();
    cmd_train->add_flag("--no-conv", [&nconf](std::int64_t) { nconf.use_conv = false; },
                        "plain decomposable attention, no conv feature");
    cmd_train->add_option("--learning-rate", topts.learning_rate)->capture_default_str();
    cmd_train->add_option("--epochs", topts.epochs)->capture_default_str();
    cmd_train->add_option("--batch-size", topts.batch_size)->capture_default_str();

    double epsilon = 1e-5;
    unsigned draws = 20;
    vf::NetConfig gconf{8, 8, 4, 4};  // small enough for exhaustive finite differences
    auto* cmd_gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    cmd_gradcheck->add_option("--epsilon", epsilon)->capture_default_str();
    cmd_gradcheck->add_option("--draws", draws)->capture_default_str();
    cmd_gradcheck->add_option("--embed-dim", gconf.embed_dim)->capture_default_str();
    cmd_gradcheck->add_option("--hidden-dim", gconf.hidden_dim)->capture_default_str();
    cmd_gradcheck->add_option("--conv-channels", gconf.conv_channels)->capture_default_str();
    cmd_gradcheck->add_option("--enc-dim", gconf.enc_dim)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    topts.seed = common.seed;

    try {
        if (cmd_index->parsed()) return run_index(dump_path, index_path);
        if (cmd_predict->parsed())
            return run_predict(index_path, model_path, claims_path, annotations_path,
                               output_path, popts, common);
        if (cmd_evaluate->parsed()) return run_evaluate(verdicts_path, gold_path, report_path);
        if (cmd_train->parsed())
            return run_train(pairs_path, nei_claims_path, index_path, model_path, nconf, topts);
        if (cmd_gradcheck->parsed()) return run_gradcheck(gconf, common.seed, epsilon, draws);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
