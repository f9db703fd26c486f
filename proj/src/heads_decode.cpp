#include "matr/heads_decode.hpp"

#include <algorithm>
#include <stdexcept>

#include "matr/metrics.hpp"

namespace matr {

void ConvHead::init(int64_t d, int64_t out_ch, RandomSource& rng) {
    out_channels = out_ch;
    w1 = xavier_init({3 * d, d}, rng);
    b1 = Array::zeros({d}, true);
    w2 = xavier_init({3 * d, d}, rng);
    b2 = Array::zeros({d}, true);
    w3 = xavier_init({3 * d, d}, rng);
    b3 = Array::zeros({d}, true);
    w_out = xavier_init({d, out_ch}, rng);
    b_out = Array::zeros({out_ch}, true);
}

void ConvHead::register_params(ParamSet& out, const std::string& prefix) const {
    out.push_back({prefix + ".conv1.w", w1});
    out.push_back({prefix + ".conv1.b", b1});
    out.push_back({prefix + ".conv2.w", w2});
    out.push_back({prefix + ".conv2.b", b2});
    out.push_back({prefix + ".conv3.w", w3});
    out.push_back({prefix + ".conv3.b", b3});
    out.push_back({prefix + ".out.w", w_out});
    out.push_back({prefix + ".out.b", b_out});
}

Var ConvHead::apply(const Var& x) const {
    Var h = relu(conv1d_same3(x, w1, b1));
    h = relu(conv1d_same3(h, w2, b2));
    h = relu(conv1d_same3(h, w3, b3));
    return add_rowvec(matmul(h, w_out), b_out);
}

HeadOutputs predict_heads(const ConvHead& cls_head, const ConvHead& boundary_head,
                          const Var& fused, int64_t target_len) {
    if (fused->shape.size() != 2 || target_len < 1 || target_len > fused->shape[0])
        throw std::invalid_argument("predict_heads: bad fused shape or target length");
    HeadOutputs out;
    out.fg_probs = sigmoid(slice(cls_head.apply(fused), 0, 0, target_len));
    out.offsets = relu(slice(boundary_head.apply(fused), 0, 0, target_len));
    return out;
}

Prediction to_prediction(const HeadOutputs& heads) {
    Prediction pred;
    const int64_t m = heads.fg_probs->shape[0];
    pred.fg_probs.assign(heads.fg_probs->data.begin(), heads.fg_probs->data.end());
    pred.offsets.resize(static_cast<size_t>(m));
    for (int64_t i = 0; i < m; ++i)
        pred.offsets[i] = {heads.offsets->data[i * 2], heads.offsets->data[i * 2 + 1]};
    return pred;
}

std::vector<Segment> decode_segments(const Prediction& pred, double frame_period_sec) {
    if (frame_period_sec <= 0)
        throw std::invalid_argument("decode_segments: frame period must be positive");
    const int64_t m = static_cast<int64_t>(pred.fg_probs.size());
    const double duration = static_cast<double>(m - 1) * frame_period_sec;
    std::vector<Segment> out;
    out.reserve(pred.fg_probs.size());
    for (int64_t i = 0; i < m; ++i) {
        const double di = static_cast<double>(i);
        double start = std::max(0.0, di - pred.offsets[i][0]) * frame_period_sec;
        double end = (di + pred.offsets[i][1]) * frame_period_sec;
        start = std::min(start, duration);
        end = std::min(end, duration);
        out.push_back({start, end, pred.fg_probs[i]});
    }
    return out;
}

namespace {

// score descending, then earlier start, then shorter
bool segment_before(const Segment& a, const Segment& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start_sec != b.start_sec) return a.start_sec < b.start_sec;
    return (a.end_sec - a.start_sec) < (b.end_sec - b.start_sec);
}

} // namespace

std::vector<Segment> nms_1d(const std::vector<Segment>& segments, double iou_threshold) {
    std::vector<Segment> order = segments;
    std::stable_sort(order.begin(), order.end(), segment_before);
    std::vector<Segment> kept;
    for (const Segment& cand : order) {
        bool suppressed = false;
        for (const Segment& k : kept)
            if (temporal_iou(cand, k) > iou_threshold) {
                suppressed = true;
                break;
            }
        if (!suppressed) kept.push_back(cand);
    }
    return kept;
}

Segment select_top1(const std::vector<Segment>& kept) {
    if (kept.empty()) throw std::runtime_error("select_top1: no candidate segments");
    const Segment* best = &kept[0];
    for (const Segment& s : kept)
        if (segment_before(s, *best)) best = &s;
    return *best;
}

} // namespace matr
