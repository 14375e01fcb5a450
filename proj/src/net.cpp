#include "vf/net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "vf/io.hpp"
#include "vf/kernels.hpp"
#include "vf/mat.hpp"
#include "vf/tokenize.hpp"

namespace vf {

namespace {

constexpr char kModelMagic[4] = {'V', 'F', 'N', 'N'};
constexpr std::uint32_t kModelVersion = 1;

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Slice offsets into the flat parameter buffer.
struct Layout {
    std::size_t embed, f_w1, f_b1, f_w2, f_b2;
    std::size_t g_w1, g_b1, g_w2, g_b2;
    std::size_t conv_k, conv_b, enc_k, enc_b;
    std::size_t agg_w1, agg_b1, agg_w2, agg_b2;
    std::size_t total;

    Layout(const NetConfig& c, std::size_t vocab_size) {
        const std::size_t e = c.embed_dim, h = c.hidden_dim, ch = c.conv_channels,
                          z = c.enc_dim, k = c.conv_kernel, w = c.enc_width;
        std::size_t off = 0;
        auto claim = [&off](std::size_t n) {
            std::size_t at = off;
            off += n;
            return at;
        };
        embed = claim((vocab_size + 1) * e);  // last row = UNK
        f_w1 = claim(h * e);
        f_b1 = claim(h);
        f_w2 = claim(h * h);
        f_b2 = claim(h);
        g_w1 = claim(h * 2 * e);
        g_b1 = claim(h);
        g_w2 = claim(h * h);
        g_b2 = claim(h);
        conv_k = claim(ch * k * k);
        conv_b = claim(ch);
        enc_k = claim(z * ch * w);
        enc_b = claim(z);
        agg_w1 = claim(h * (2 * h + z));
        agg_b1 = claim(h);
        agg_w2 = claim(3 * h);
        agg_b2 = claim(3);
        total = off;
    }
};

// y = W x + b with W row-major (rows x cols).
void dense(const double* w, const double* b, const double* x, double* y, std::size_t rows,
           std::size_t cols) {
    for (std::size_t o = 0; o < rows; ++o) y[o] = b[o] + kern::dot(w + o * cols, x, cols);
}

// Gradients of dense given dy; accumulates into dw, db, dx (dx may be null).
void dense_backward(const double* w, const double* x, const double* dy, double* dw, double* db,
                    double* dx, std::size_t rows, std::size_t cols) {
    for (std::size_t o = 0; o < rows; ++o) {
        kern::axpy(dy[o], x, dw + o * cols, cols);
        db[o] += dy[o];
        if (dx) kern::axpy(dy[o], w + o * cols, dx, cols);
    }
}

void relu_backward(const double* pre, double* d, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (pre[i] <= 0.0) d[i] = 0.0;
}

// Forward activations kept for the backward pass.
struct Activations {
    std::vector<std::uint32_t> prem_ids, hyp_ids;
    Matrix a, b;                       // embeddings
    Matrix f1pre_a, f1act_a, f2pre_a;  // F on premise; f-act = relu(f2pre)
    Matrix fa;
    Matrix f1pre_b, f1act_b, f2pre_b;
    Matrix fb;
    Matrix e;  // attention scores
    AttendPools pools;
    Matrix g_in_a, g1pre_a, g1act_a, g2pre_a, g2act_a;  // compare premise rows
    Matrix g_in_b, g1pre_b, g1act_b, g2pre_b, g2act_b;
    std::vector<double> v1, v2;
    bool conv_active = false;
    std::size_t pm = 0, pn = 0;  // conv output grid
    Matrix conv_pre, conv_act;   // P x C
    Matrix enc_pre, enc_act;     // P x Z
    std::vector<std::size_t> enc_argmax;
    std::vector<double> zvec;
    std::vector<double> agg_in, q1pre, q1act, logits, probs;
};

}  // namespace

Label EntailmentDistribution::argmax() const {
    // ties resolve to the earlier column (SUPPORTS > REFUTES > NEI)
    if (p_supports >= p_refutes && p_supports >= p_nei) return Label::Supports;
    if (p_refutes >= p_nei) return Label::Refutes;
    return Label::Nei;
}

EntailmentNet::EntailmentNet(NetConfig config, std::vector<std::string> vocab,
                             std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)) {
    std::sort(vocab_.begin(), vocab_.end());
    vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
    for (std::uint32_t i = 0; i < vocab_.size(); ++i) vocab_map_[vocab_[i]] = i;

    Layout layout(config_, vocab_.size());
    params_.assign(layout.total, 0.0);

    const std::size_t e = config_.embed_dim;
    // hash-seeded trainable embeddings
    for (std::size_t v = 0; v < vocab_.size(); ++v) {
        std::mt19937_64 rng(fnv1a64(vocab_[v]) ^ seed);
        std::normal_distribution<double> dist(0.0, 0.1);
        for (std::size_t d = 0; d < e; ++d) params_[layout.embed + v * e + d] = dist(rng);
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> unk(0.0, 0.1);
    for (std::size_t d = 0; d < e; ++d)
        params_[layout.embed + vocab_.size() * e + d] = unk(rng);

    auto glorot = [&rng, this](std::size_t off, std::size_t rows, std::size_t cols) {
        double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> dist(-r, r);
        for (std::size_t i = 0; i < rows * cols; ++i) params_[off + i] = dist(rng);
    };
    // Biases get small random values rather than zeros: an exactly-zero
    // pre-activation sits on the ReLU kink, which breaks finite-difference
    // gradient comparisons.
    auto bias = [&rng, this](std::size_t off, std::size_t n) {
        std::uniform_real_distribution<double> dist(-0.05, 0.05);
        for (std::size_t i = 0; i < n; ++i) params_[off + i] = dist(rng);
    };
    const std::size_t h = config_.hidden_dim, ch = config_.conv_channels, z = config_.enc_dim,
                      k = config_.conv_kernel, w = config_.enc_width;
    glorot(layout.f_w1, h, e);
    bias(layout.f_b1, h);
    glorot(layout.f_w2, h, h);
    bias(layout.f_b2, h);
    glorot(layout.g_w1, h, 2 * e);
    bias(layout.g_b1, h);
    glorot(layout.g_w2, h, h);
    bias(layout.g_b2, h);
    glorot(layout.conv_k, ch, k * k);
    bias(layout.conv_b, ch);
    glorot(layout.enc_k, z, ch * w);
    bias(layout.enc_b, z);
    glorot(layout.agg_w1, h, 2 * h + z);
    bias(layout.agg_b1, h);
    glorot(layout.agg_w2, 3, h);
    bias(layout.agg_b2, 3);
}

std::uint32_t EntailmentNet::token_id(const std::string& token) const {
    auto it = vocab_map_.find(token);
    return it == vocab_map_.end() ? static_cast<std::uint32_t>(vocab_.size()) : it->second;
}

std::uint32_t EntailmentNet::conv_positions(std::uint32_t m, std::uint32_t n) const {
    const std::uint32_t k = config_.conv_kernel;
    if (m < k || n < k) return 0;
    return (m - k + 1) * (n - k + 1);
}

namespace {

void run_forward(const NetConfig& cfg, const Layout& layout, const std::vector<double>& params,
                 const std::vector<std::uint32_t>& prem_ids,
                 const std::vector<std::uint32_t>& hyp_ids, bool force_zero_conv,
                 Activations& act) {
    const std::size_t e = cfg.embed_dim, h = cfg.hidden_dim, ch = cfg.conv_channels,
                      z = cfg.enc_dim, k = cfg.conv_kernel, w = cfg.enc_width;
    const std::size_t m = prem_ids.size(), n = hyp_ids.size();
    const double* p = params.data();

    act.prem_ids = prem_ids;
    act.hyp_ids = hyp_ids;
    act.a = Matrix(m, e);
    act.b = Matrix(n, e);
    for (std::size_t i = 0; i < m; ++i)
        std::copy_n(p + layout.embed + prem_ids[i] * e, e, act.a.row(i));
    for (std::size_t j = 0; j < n; ++j)
        std::copy_n(p + layout.embed + hyp_ids[j] * e, e, act.b.row(j));

    auto apply_f = [&](const Matrix& x, Matrix& pre1, Matrix& act1, Matrix& pre2, Matrix& out) {
        pre1 = Matrix(x.rows, h);
        act1 = Matrix(x.rows, h);
        pre2 = Matrix(x.rows, h);
        out = Matrix(x.rows, h);
        for (std::size_t i = 0; i < x.rows; ++i) {
            dense(p + layout.f_w1, p + layout.f_b1, x.row(i), pre1.row(i), h, e);
            std::copy_n(pre1.row(i), h, act1.row(i));
            kern::relu(act1.row(i), h);
            dense(p + layout.f_w2, p + layout.f_b2, act1.row(i), pre2.row(i), h, h);
            std::copy_n(pre2.row(i), h, out.row(i));
            kern::relu(out.row(i), h);
        }
    };
    apply_f(act.a, act.f1pre_a, act.f1act_a, act.f2pre_a, act.fa);
    apply_f(act.b, act.f1pre_b, act.f1act_b, act.f2pre_b, act.fb);

    act.e = attend_scores(act.fa, act.fb);
    act.pools = attention_pools(act.e, act.a, act.b);

    auto apply_g = [&](const Matrix& x, const Matrix& aligned, Matrix& g_in, Matrix& pre1,
                       Matrix& act1, Matrix& pre2, Matrix& out) {
        g_in = Matrix(x.rows, 2 * e);
        pre1 = Matrix(x.rows, h);
        act1 = Matrix(x.rows, h);
        pre2 = Matrix(x.rows, h);
        out = Matrix(x.rows, h);
        for (std::size_t i = 0; i < x.rows; ++i) {
            std::copy_n(x.row(i), e, g_in.row(i));
            std::copy_n(aligned.row(i), e, g_in.row(i) + e);
            dense(p + layout.g_w1, p + layout.g_b1, g_in.row(i), pre1.row(i), h, 2 * e);
            std::copy_n(pre1.row(i), h, act1.row(i));
            kern::relu(act1.row(i), h);
            dense(p + layout.g_w2, p + layout.g_b2, act1.row(i), pre2.row(i), h, h);
            std::copy_n(pre2.row(i), h, out.row(i));
            kern::relu(out.row(i), h);
        }
    };
    apply_g(act.a, act.pools.beta, act.g_in_a, act.g1pre_a, act.g1act_a, act.g2pre_a, act.g2act_a);
    apply_g(act.b, act.pools.alpha, act.g_in_b, act.g1pre_b, act.g1act_b, act.g2pre_b,
            act.g2act_b);

    act.v1.assign(h, 0.0);
    act.v2.assign(h, 0.0);
    for (std::size_t i = 0; i < m; ++i) kern::axpy(1.0, act.g2act_a.row(i), act.v1.data(), h);
    for (std::size_t j = 0; j < n; ++j) kern::axpy(1.0, act.g2act_b.row(j), act.v2.data(), h);

    act.zvec.assign(z, 0.0);
    act.conv_active = cfg.use_conv && !force_zero_conv && m >= k && n >= k;
    if (act.conv_active) {
        act.pm = m - k + 1;
        act.pn = n - k + 1;
        const std::size_t np = act.pm * act.pn;
        act.conv_pre = Matrix(np, ch);
        act.conv_act = Matrix(np, ch);
        for (std::size_t pi = 0; pi < act.pm; ++pi) {
            for (std::size_t pj = 0; pj < act.pn; ++pj) {
                std::size_t pos = pi * act.pn + pj;  // row-major position order
                for (std::size_t c = 0; c < ch; ++c) {
                    double sum = params[layout.conv_b + c];
                    const double* kr = p + layout.conv_k + c * k * k;
                    for (std::size_t u = 0; u < k; ++u)
                        sum += kern::dot(kr + u * k, act.e.row(pi + u) + pj, k);
                    act.conv_pre.at(pos, c) = sum;
                }
                std::copy_n(act.conv_pre.row(pos), ch, act.conv_act.row(pos));
                kern::relu(act.conv_act.row(pos), ch);
            }
        }
        // 1-D conv (width w, zero-padded) over the position sequence,
        // then max-over-time
        act.enc_pre = Matrix(np, z);
        act.enc_act = Matrix(np, z);
        const std::size_t half = w / 2;
        for (std::size_t pos = 0; pos < np; ++pos) {
            for (std::size_t zc = 0; zc < z; ++zc) {
                double sum = params[layout.enc_b + zc];
                for (std::size_t t = 0; t < w; ++t) {
                    std::ptrdiff_t q = static_cast<std::ptrdiff_t>(pos + t) -
                                       static_cast<std::ptrdiff_t>(half);
                    if (q < 0 || q >= static_cast<std::ptrdiff_t>(np)) continue;
                    sum += kern::dot(p + layout.enc_k + (zc * w + t) * ch, act.conv_act.row(q),
                                     ch);
                }
                act.enc_pre.at(pos, zc) = sum;
            }
            std::copy_n(act.enc_pre.row(pos), z, act.enc_act.row(pos));
            kern::relu(act.enc_act.row(pos), z);
        }
        act.enc_argmax.assign(z, 0);
        for (std::size_t zc = 0; zc < z; ++zc) {
            double best = act.enc_act.at(0, zc);
            std::size_t best_pos = 0;
            for (std::size_t pos = 1; pos < np; ++pos)
                if (act.enc_act.at(pos, zc) > best) {
                    best = act.enc_act.at(pos, zc);
                    best_pos = pos;
                }
            act.zvec[zc] = best;
            act.enc_argmax[zc] = best_pos;
        }
    }

    act.agg_in.assign(2 * h + z, 0.0);
    std::copy_n(act.v1.data(), h, act.agg_in.data());
    std::copy_n(act.v2.data(), h, act.agg_in.data() + h);
    std::copy_n(act.zvec.data(), z, act.agg_in.data() + 2 * h);
    act.q1pre.assign(h, 0.0);
    dense(p + layout.agg_w1, p + layout.agg_b1, act.agg_in.data(), act.q1pre.data(), h,
          2 * h + z);
    act.q1act = act.q1pre;
    kern::relu(act.q1act.data(), h);
    act.logits.assign(3, 0.0);
    dense(p + layout.agg_w2, p + layout.agg_b2, act.q1act.data(), act.logits.data(), 3, h);
    act.probs = act.logits;
    softmax_inplace(act.probs.data(), 3);
}

void run_backward(const NetConfig& cfg, const Layout& layout, const std::vector<double>& params,
                  const Activations& act, Label gold, std::vector<double>& grad) {
    const std::size_t e = cfg.embed_dim, h = cfg.hidden_dim, ch = cfg.conv_channels,
                      z = cfg.enc_dim, k = cfg.conv_kernel, w = cfg.enc_width;
    const std::size_t m = act.a.rows, n = act.b.rows;
    const double* p = params.data();
    double* g = grad.data();

    // softmax + cross-entropy
    std::vector<double> dlogits(act.probs);
    dlogits[static_cast<std::size_t>(gold)] -= 1.0;

    std::vector<double> dq1(h, 0.0);
    dense_backward(p + layout.agg_w2, act.q1act.data(), dlogits.data(), g + layout.agg_w2,
                   g + layout.agg_b2, dq1.data(), 3, h);
    relu_backward(act.q1pre.data(), dq1.data(), h);
    std::vector<double> dagg_in(2 * h + z, 0.0);
    dense_backward(p + layout.agg_w1, act.agg_in.data(), dq1.data(), g + layout.agg_w1,
                   g + layout.agg_b1, dagg_in.data(), h, 2 * h + z);

    std::vector<double> dv1(dagg_in.begin(), dagg_in.begin() + h);
    std::vector<double> dv2(dagg_in.begin() + h, dagg_in.begin() + 2 * h);
    std::vector<double> dz(dagg_in.begin() + 2 * h, dagg_in.end());

    Matrix de(m, n);  // gradient w.r.t. attention scores

    if (act.conv_active) {
        const std::size_t np = act.pm * act.pn;
        Matrix denc_act(np, z);
        for (std::size_t zc = 0; zc < z; ++zc)
            denc_act.at(act.enc_argmax[zc], zc) += dz[zc];
        Matrix denc_pre = denc_act;
        for (std::size_t pos = 0; pos < np; ++pos)
            relu_backward(act.enc_pre.row(pos), denc_pre.row(pos), z);

        Matrix dconv_act(np, ch);
        const std::size_t half = w / 2;
        for (std::size_t pos = 0; pos < np; ++pos) {
            for (std::size_t zc = 0; zc < z; ++zc) {
                double d = denc_pre.at(pos, zc);
                if (d == 0.0) continue;
                g[layout.enc_b + zc] += d;
                for (std::size_t t = 0; t < w; ++t) {
                    std::ptrdiff_t q = static_cast<std::ptrdiff_t>(pos + t) -
                                       static_cast<std::ptrdiff_t>(half);
                    if (q < 0 || q >= static_cast<std::ptrdiff_t>(np)) continue;
                    kern::axpy(d, act.conv_act.row(q), g + layout.enc_k + (zc * w + t) * ch, ch);
                    kern::axpy(d, p + layout.enc_k + (zc * w + t) * ch, dconv_act.row(q), ch);
                }
            }
        }

        Matrix dconv_pre = dconv_act;
        for (std::size_t pos = 0; pos < np; ++pos)
            relu_backward(act.conv_pre.row(pos), dconv_pre.row(pos), ch);
        for (std::size_t pi = 0; pi < act.pm; ++pi) {
            for (std::size_t pj = 0; pj < act.pn; ++pj) {
                std::size_t pos = pi * act.pn + pj;
                for (std::size_t c = 0; c < ch; ++c) {
                    double d = dconv_pre.at(pos, c);
                    if (d == 0.0) continue;
                    g[layout.conv_b + c] += d;
                    double* kg = g + layout.conv_k + c * k * k;
                    const double* kr = p + layout.conv_k + c * k * k;
                    for (std::size_t u = 0; u < k; ++u) {
                        kern::axpy(d, act.e.row(pi + u) + pj, kg + u * k, k);
                        kern::axpy(d, kr + u * k, de.row(pi + u) + pj, k);
                    }
                }
            }
        }
    }

    // compare nets
    Matrix da(m, e), db(n, e), dbeta(m, e), dalpha(n, e);
    {
        std::vector<double> dg2(h), dg1(h), dg_in(2 * e);
        for (std::size_t i = 0; i < m; ++i) {
            dg2 = dv1;  // sum pool: every row gets the same gradient
            relu_backward(act.g2pre_a.row(i), dg2.data(), h);
            std::fill(dg1.begin(), dg1.end(), 0.0);
            dense_backward(p + layout.g_w2, act.g1act_a.row(i), dg2.data(), g + layout.g_w2,
                           g + layout.g_b2, dg1.data(), h, h);
            relu_backward(act.g1pre_a.row(i), dg1.data(), h);
            std::fill(dg_in.begin(), dg_in.end(), 0.0);
            dense_backward(p + layout.g_w1, act.g_in_a.row(i), dg1.data(), g + layout.g_w1,
                           g + layout.g_b1, dg_in.data(), h, 2 * e);
            kern::axpy(1.0, dg_in.data(), da.row(i), e);
            kern::axpy(1.0, dg_in.data() + e, dbeta.row(i), e);
        }
        for (std::size_t j = 0; j < n; ++j) {
            dg2 = dv2;
            relu_backward(act.g2pre_b.row(j), dg2.data(), h);
            std::fill(dg1.begin(), dg1.end(), 0.0);
            dense_backward(p + layout.g_w2, act.g1act_b.row(j), dg2.data(), g + layout.g_w2,
                           g + layout.g_b2, dg1.data(), h, h);
            relu_backward(act.g1pre_b.row(j), dg1.data(), h);
            std::fill(dg_in.begin(), dg_in.end(), 0.0);
            dense_backward(p + layout.g_w1, act.g_in_b.row(j), dg1.data(), g + layout.g_w1,
                           g + layout.g_b1, dg_in.data(), h, 2 * e);
            kern::axpy(1.0, dg_in.data(), db.row(j), e);
            kern::axpy(1.0, dg_in.data() + e, dalpha.row(j), e);
        }
    }

    // beta = R b, alpha = C^T a
    const Matrix& r = act.pools.row_softmax;
    const Matrix& c = act.pools.col_softmax;
    Matrix dr(m, n), dc(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dr.at(i, j) = kern::dot(dbeta.row(i), act.b.row(j), e);
            kern::axpy(r.at(i, j), dbeta.row(i), db.row(j), e);
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            dc.at(i, j) = kern::dot(dalpha.row(j), act.a.row(i), e);
            kern::axpy(c.at(i, j), dalpha.row(j), da.row(i), e);
        }

    // softmax jacobians into the score matrix
    for (std::size_t i = 0; i < m; ++i) {
        double inner = kern::dot(r.row(i), dr.row(i), n);
        for (std::size_t j = 0; j < n; ++j)
            de.at(i, j) += r.at(i, j) * (dr.at(i, j) - inner);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double inner = 0.0;
        for (std::size_t i = 0; i < m; ++i) inner += c.at(i, j) * dc.at(i, j);
        for (std::size_t i = 0; i < m; ++i)
            de.at(i, j) += c.at(i, j) * (dc.at(i, j) - inner);
    }

    // e[i][j] = fa_i . fb_j
    Matrix dfa(m, h), dfb(n, h);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double d = de.at(i, j);
            if (d == 0.0) continue;
            kern::axpy(d, act.fb.row(j), dfa.row(i), h);
            kern::axpy(d, act.fa.row(i), dfb.row(j), h);
        }

    // F net, shared between both sides
    {
        std::vector<double> df2(h), df1(h), dx(e);
        auto back_f = [&](const Matrix& x, const Matrix& pre1, const Matrix& act1,
                          const Matrix& pre2, const Matrix& dout, Matrix& dx_total) {
            for (std::size_t i = 0; i < x.rows; ++i) {
                std::copy_n(dout.row(i), h, df2.data());
                relu_backward(pre2.row(i), df2.data(), h);
                std::fill(df1.begin(), df1.end(), 0.0);
                dense_backward(p + layout.f_w2, act1.row(i), df2.data(), g + layout.f_w2,
                               g + layout.f_b2, df1.data(), h, h);
                relu_backward(pre1.row(i), df1.data(), h);
                std::fill(dx.begin(), dx.end(), 0.0);
                dense_backward(p + layout.f_w1, x.row(i), df1.data(), g + layout.f_w1,
                               g + layout.f_b1, dx.data(), h, e);
                kern::axpy(1.0, dx.data(), dx_total.row(i), e);
            }
        };
        back_f(act.a, act.f1pre_a, act.f1act_a, act.f2pre_a, dfa, da);
        back_f(act.b, act.f1pre_b, act.f1act_b, act.f2pre_b, dfb, db);
    }

    // embedding rows
    for (std::size_t i = 0; i < m; ++i)
        kern::axpy(1.0, da.row(i), g + layout.embed + act.prem_ids[i] * e, e);
    for (std::size_t j = 0; j < n; ++j)
        kern::axpy(1.0, db.row(j), g + layout.embed + act.hyp_ids[j] * e, e);
}

}  // namespace

EntailmentDistribution EntailmentNet::forward(const std::vector<std::string>& premise,
                                              const std::vector<std::string>& hypothesis,
                                              bool force_zero_conv) const {
    if (premise.empty() || hypothesis.empty())
        throw std::invalid_argument("entailment input must be non-empty");
    std::vector<std::uint32_t> prem_ids, hyp_ids;
    prem_ids.reserve(premise.size());
    hyp_ids.reserve(hypothesis.size());
    for (const auto& t : premise) prem_ids.push_back(token_id(t));
    for (const auto& t : hypothesis) hyp_ids.push_back(token_id(t));
    Layout layout(config_, vocab_.size());
    Activations act;
    run_forward(config_, layout, params_, prem_ids, hyp_ids, force_zero_conv, act);
    return {act.probs[0], act.probs[1], act.probs[2]};
}

EntailmentDistribution EntailmentNet::predict(const std::vector<std::string>& premise,
                                              const std::vector<std::string>& hypothesis) const {
    return forward(premise, hypothesis, false);
}

EntailmentDistribution EntailmentNet::predict_zero_conv(
    const std::vector<std::string>& premise, const std::vector<std::string>& hypothesis) const {
    return forward(premise, hypothesis, true);
}

double EntailmentNet::loss_and_grad(const TrainingPair& pair, std::vector<double>& grad) const {
    if (pair.premise.empty() || pair.hypothesis.empty())
        throw std::invalid_argument("entailment input must be non-empty");
    std::vector<std::uint32_t> prem_ids, hyp_ids;
    for (const auto& t : pair.premise) prem_ids.push_back(token_id(t));
    for (const auto& t : pair.hypothesis) hyp_ids.push_back(token_id(t));
    Layout layout(config_, vocab_.size());
    if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
    Activations act;
    run_forward(config_, layout, params_, prem_ids, hyp_ids, false, act);
    run_backward(config_, layout, params_, act, pair.label, grad);
    return -std::log(std::max(act.probs[static_cast<std::size_t>(pair.label)], 1e-300));
}

double EntailmentNet::loss(const TrainingPair& pair) const {
    EntailmentDistribution dist = predict(pair.premise, pair.hypothesis);
    return -std::log(std::max(dist[static_cast<std::size_t>(pair.label)], 1e-300));
}

void EntailmentNet::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out.write(kModelMagic, 4);
    io::write_u32(out, kModelVersion);
    io::write_u32(out, config_.embed_dim);
    io::write_u32(out, config_.hidden_dim);
    io::write_u32(out, config_.conv_channels);
    io::write_u32(out, config_.enc_dim);
    io::write_u32(out, config_.conv_kernel);
    io::write_u32(out, config_.enc_width);
    io::write_u32(out, config_.use_conv ? 1 : 0);
    io::write_u64(out, vocab_.size());
    for (const auto& t : vocab_) io::write_str(out, t);
    io::write_u64(out, params_.size());
    for (double v : params_) io::write_f64(out, v);
    if (!out) throw std::runtime_error("error writing model file: " + path);
}

EntailmentNet EntailmentNet::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
        throw std::runtime_error("not a model file: " + path);
    std::uint32_t version = io::read_u32(in);
    if (version != kModelVersion)
        throw std::runtime_error("unsupported model version " + std::to_string(version));
    EntailmentNet net;
    net.config_.embed_dim = io::read_u32(in);
    net.config_.hidden_dim = io::read_u32(in);
    net.config_.conv_channels = io::read_u32(in);
    net.config_.enc_dim = io::read_u32(in);
    net.config_.conv_kernel = io::read_u32(in);
    net.config_.enc_width = io::read_u32(in);
    net.config_.use_conv = io::read_u32(in) != 0;
    std::uint64_t nv = io::read_u64(in);
    net.vocab_.reserve(nv);
    for (std::uint64_t i = 0; i < nv; ++i) net.vocab_.push_back(io::read_str(in));
    for (std::uint32_t i = 0; i < net.vocab_.size(); ++i) net.vocab_map_[net.vocab_[i]] = i;
    std::uint64_t np = io::read_u64(in);
    Layout layout(net.config_, net.vocab_.size());
    if (np != layout.total) throw std::runtime_error("model parameter count mismatch");
    net.params_.reserve(np);
    for (std::uint64_t i = 0; i < np; ++i) net.params_.push_back(io::read_f64(in));
    return net;
}

TrainResult train(EntailmentNet& net, const std::vector<TrainingPair>& pairs,
                  const TrainOptions& options) {
    TrainResult result;
    if (pairs.empty()) return result;
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(net.params().size(), 0.0);

    for (std::uint32_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t done = 0;
        while (done < order.size()) {
            std::size_t batch = std::min<std::size_t>(options.batch_size, order.size() - done);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = 0; b < batch; ++b)
                epoch_loss += net.loss_and_grad(pairs[order[done + b]], grad);
            kern::axpy(-options.learning_rate / static_cast<double>(batch), grad.data(),
                       net.params().data(), grad.size());
            done += batch;
        }
        epoch_loss /= static_cast<double>(pairs.size());
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("non-finite training loss at epoch " +
                                     std::to_string(epoch) + "; lower the learning rate");
        result.epoch_loss.push_back(epoch_loss);
    }
    return result;
}

EntailmentNet train_new(const NetConfig& config, const std::vector<TrainingPair>& pairs,
                        const TrainOptions& options) {
    std::vector<std::string> vocab;
    for (const auto& pair : pairs) {
        vocab.insert(vocab.end(), pair.premise.begin(), pair.premise.end());
        vocab.insert(vocab.end(), pair.hypothesis.begin(), pair.hypothesis.end());
    }
    EntailmentNet net(config, std::move(vocab), options.seed);
    train(net, pairs, options);
    return net;
}

double gradient_check(const EntailmentNet& net, const TrainingPair& pair, double epsilon) {
    std::vector<double> analytic;
    EntailmentNet copy = net;
    copy.loss_and_grad(pair, analytic);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < copy.params().size(); ++i) {
        double saved = copy.params()[i];
        copy.params()[i] = saved + epsilon;
        double up = copy.loss(pair);
        copy.params()[i] = saved - epsilon;
        double down = copy.loss(pair);
        copy.params()[i] = saved;
        double numeric = (up - down) / (2.0 * epsilon);
        double a = analytic[i];
        if (std::abs(a) < 1e-7 && std::abs(numeric) < 1e-7) continue;
        double rel = std::abs(a - numeric) / std::max(std::abs(a), std::abs(numeric));
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

std::vector<TrainingPair> generate_nei_pairs(const std::vector<std::string>& nei_claims,
                                             const IndexedCorpus& corpus, std::uint64_t seed) {
    std::vector<TrainingPair> pairs;
    if (corpus.size() == 0) return pairs;
    for (const auto& claim : nei_claims) {
        std::mt19937_64 rng(seed ^ fnv1a64(claim));
        std::vector<std::string> claim_tokens = tokenize(claim);
        // pages whose title shares a word with the claim; pick a page, then
        // one of its sentences
        std::vector<std::pair<std::string, std::vector<std::uint32_t>>> matching_pages;
        for (std::uint32_t doc_id = 0; doc_id < corpus.size(); ++doc_id) {
            const SentenceDoc& doc = corpus.docs()[doc_id];
            const auto& title = doc.title_tokens;
            bool match = false;
            for (const auto& t : claim_tokens) {
                if (std::find(title.begin(), title.end(), t) != title.end()) {
                    match = true;
                    break;
                }
            }
            if (!match) continue;
            // docs are sorted by title, so a page's sentences are contiguous
            if (matching_pages.empty() || matching_pages.back().first != doc.page_title_display)
                matching_pages.emplace_back(doc.page_title_display,
                                            std::vector<std::uint32_t>{});
            matching_pages.back().second.push_back(doc_id);
        }
        std::uint32_t chosen;
        if (!matching_pages.empty()) {
            std::uniform_int_distribution<std::size_t> pick_page(0, matching_pages.size() - 1);
            const auto& sentences = matching_pages[pick_page(rng)].second;
            std::uniform_int_distribution<std::size_t> pick_sent(0, sentences.size() - 1);
            chosen = sentences[pick_sent(rng)];
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
            chosen = static_cast<std::uint32_t>(pick(rng));
        }
        TrainingPair pair;
        pair.premise = tokenize(presented_text(corpus.docs()[chosen]));
        pair.hypothesis = claim_tokens;
        pair.label = Label::Nei;
        if (!pair.premise.empty() && !pair.hypothesis.empty()) pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<TrainingPair> load_training_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open training pair file: " + path);
    std::vector<TrainingPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw std::runtime_error("bad training pair at line " + std::to_string(lineno));
        TrainingPair pair;
        pair.premise = tokenize(j.at("premise").get<std::string>());
        pair.hypothesis = tokenize(j.at("hypothesis").get<std::string>());
        auto label = label_from_string(j.at("label").get<std::string>());
        if (!label)
            throw std::runtime_error("bad label at line " + std::to_string(lineno));
        pair.label = *label;
        if (pair.premise.empty() || pair.hypothesis.empty()) continue;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace vf
