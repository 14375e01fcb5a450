#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "vf/index.hpp"
#include "vf/label.hpp"

namespace vf {

struct EntailmentDistribution {
    double p_supports = 0.0;
    double p_refutes = 0.0;
    double p_nei = 0.0;

    double operator[](std::size_t i) const {
        return i == 0 ? p_supports : i == 1 ? p_refutes : p_nei;
    }
    Label argmax() const;
};

struct TrainingPair {
    std::vector<std::string> premise;
    std::vector<std::string> hypothesis;
    Label label = Label::Nei;
};

struct NetConfig {
    std::uint32_t embed_dim = 50;
    std::uint32_t hidden_dim = 64;
    std::uint32_t conv_channels = 16;
    std::uint32_t enc_dim = 32;
    std::uint32_t conv_kernel = 12;  // spatial size, fixed by the architecture
    std::uint32_t enc_width = 3;     // 1-D conv width of the fixed-length encoder
    bool use_conv = true;            // off = unmodified decomposable attention
};

// Decomposable attention with an extra 2-D convolution over the attention
// matrix for long pairs, reduced to a fixed-size vector and concatenated to
// the aggregate input. All parameters live in one flat buffer; the layout
// assigns each tensor a contiguous slice.
class EntailmentNet {
public:
    EntailmentNet() = default;
    EntailmentNet(NetConfig config, std::vector<std::string> vocab, std::uint64_t seed);

    const NetConfig& config() const { return config_; }
    const std::vector<std::string>& vocab() const { return vocab_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    EntailmentDistribution predict(const std::vector<std::string>& premise,
                                   const std::vector<std::string>& hypothesis) const;

    // Forward pass with the conv feature forced to zero regardless of
    // lengths; used by the gating equivalence check.
    EntailmentDistribution predict_zero_conv(const std::vector<std::string>& premise,
                                             const std::vector<std::string>& hypothesis) const;

    // Number of conv spatial positions for a given pair of lengths:
    // (m-11)(n-11) when both reach the kernel size, else 0.
    std::uint32_t conv_positions(std::uint32_t m, std::uint32_t n) const;

    // Cross-entropy loss and gradient w.r.t. the flat parameter vector.
    double loss_and_grad(const TrainingPair& pair, std::vector<double>& grad) const;
    double loss(const TrainingPair& pair) const;

    void save(const std::string& path) const;
    static EntailmentNet load(const std::string& path);

    std::uint32_t token_id(const std::string& token) const;  // vocab size = UNK

private:
    NetConfig config_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::uint32_t> vocab_map_;
    std::vector<double> params_;

    EntailmentDistribution forward(const std::vector<std::string>& premise,
                                   const std::vector<std::string>& hypothesis,
                                   bool force_zero_conv) const;
};

struct TrainOptions {
    double learning_rate = 0.05;
    std::uint32_t epochs = 50;
    std::uint32_t batch_size = 8;
    std::uint64_t seed = 1;
};

struct TrainResult {
    std::vector<double> epoch_loss;
};

// Plain SGD over shuffled batches; deterministic for a fixed seed. Throws
// on non-finite loss.
TrainResult train(EntailmentNet& net, const std::vector<TrainingPair>& pairs,
                  const TrainOptions& options);

// Builds a net whose vocab is collected from the pairs, then trains it.
EntailmentNet train_new(const NetConfig& config, const std::vector<TrainingPair>& pairs,
                        const TrainOptions& options);

// Central finite differences over every parameter; returns the max relative
// error. Double precision only.
double gradient_check(const EntailmentNet& net, const TrainingPair& pair, double epsilon);

// NEI premises: a random sentence from a page whose title shares a word with
// the claim, else a uniformly random corpus sentence.
std::vector<TrainingPair> generate_nei_pairs(const std::vector<std::string>& nei_claims,
                                             const IndexedCorpus& corpus, std::uint64_t seed);

std::vector<TrainingPair> load_training_pairs(const std::string& path);

}  // namespace vf
