#ifndef MATR_MODEL_HPP
#define MATR_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "matr/alignment.hpp"
#include "matr/array.hpp"
#include "matr/heads_decode.hpp"
#include "matr/optimizer.hpp"
#include "matr/types.hpp"

namespace matr {

struct ModelConfig {
    int64_t input_dim = 512; // raw feature dimension fed to the projection
    int64_t d = 64;          // hidden dimension (paper-scale value: 1024)
    int64_t k = 2;           // encoder and decoder layer count (paper: 4)
    int64_t l = 10;          // learnable moment queries
    int64_t heads = 4;
    int64_t ffn_mult = 4;
    double dropout_transformer = 0.1;
    double dropout_projection = 0.5;
    double gamma = 0.1;        // soft-min smoothing for both alignment stages
    bool use_post_span = true; // route the post-fusion span into the decoder

    void validate() const;
    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
};

// Sinusoidal table, length x d, values in [-1, 1]. d must be even.
Var positional_encoding(int64_t length, int64_t d);

struct AttentionParams {
    Var wq, bq, wk, bk, wv, bv, wo, bo;
    void init(int64_t d, RandomSource& rng);
    void register_params(ParamSet& out, const std::string& prefix) const;
};

struct FeedForwardParams {
    Var w1, b1, w2, b2;
    void init(int64_t d, int64_t hidden, RandomSource& rng);
    void register_params(ParamSet& out, const std::string& prefix) const;
};

struct LayerNormParams {
    Var gain, bias;
    void init(int64_t d);
    void register_params(ParamSet& out, const std::string& prefix) const;
};

struct EncoderLayerParams {
    AttentionParams self_attn;
    FeedForwardParams ffn;
    LayerNormParams norm1, norm2;
};

struct DecoderLayerParams {
    AttentionParams self_attn, cross_attn;
    FeedForwardParams ffn;
    LayerNormParams norm1, norm2, norm3;
};

// LayerNorm -> dropout -> linear -> ReLU, applied twice
// (input_dim -> d -> d); shared between target and query.
struct ProjectionParams {
    LayerNormParams norm1, norm2;
    Var w1, b1, w2, b2;
};

struct ModelOutput {
    Var encoder_target; // (M,d)
    Var encoder_query;  // (N,d)
    Var decoder_out;    // (l,d)
    Var fused;          // (M+l,d)
    Var align_pre_loss; // scalars
    Var align_post_loss;
    AlignmentResult pre_align;
    AlignmentResult post_align;
    std::pair<int64_t, int64_t> span{0, 0}; // decoder cross-attention window
    Var fg_probs; // (M,1)
    Var offsets;  // (M,2)

    Prediction prediction() const;
};

enum class Mode { kTrain, kEval };

/*
 * The full network: shared projection, fusion encoder over the
 * concatenated (target; query) sequence, soft-DTW alignment before and
 * after the encoder, decoder over learnable queries cross-attending to
 * the aligned target span, and the two convolutional prediction heads
 * over E_f = [E_t^g; E_t^l].
 */
class MatrModel {
public:
    explicit MatrModel(ModelConfig cfg);

    void init(uint64_t seed);
    const ModelConfig& config() const { return cfg_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    void zero_grads();

    Var project(const Var& features, Mode mode, RandomSource* rng) const;
    std::pair<Var, Var> encode(const Var& target, const Var& query, Mode mode,
                               RandomSource* rng) const;
    Var decode(const Var& encoder_target, std::pair<int64_t, int64_t> span, Mode mode,
               RandomSource* rng) const;

    ModelOutput forward(const FeatureSequence& target, const FeatureSequence& query, Mode mode,
                        RandomSource* rng) const;
    // same pipeline on already-materialized feature nodes
    ModelOutput forward(const Var& target, const Var& query, Mode mode, RandomSource* rng) const;

private:
    ModelConfig cfg_;
    ProjectionParams projection_;
    std::vector<EncoderLayerParams> encoder_;
    std::vector<DecoderLayerParams> decoder_;
    Var queries_; // (l,d)
    ConvHead cls_head_, boundary_head_;
    ParamSet params_;

    void register_all();
};

} // namespace matr

#endif
