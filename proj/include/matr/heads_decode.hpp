#ifndef MATR_HEADS_DECODE_HPP
#define MATR_HEADS_DECODE_HPP

#include <vector>

#include "matr/array.hpp"
#include "matr/optimizer.hpp"
#include "matr/types.hpp"

namespace matr {

/*
 * Shared head trunk: three width-3 temporal convolutions (d -> d, ReLU)
 * followed by a pointwise projection to the output channels, so the
 * receptive field of position i spans i±3.
 */
struct ConvHead {
    Var w1, b1, w2, b2, w3, b3, w_out, b_out;
    int64_t out_channels = 0;

    void init(int64_t d, int64_t out_ch, RandomSource& rng);
    void register_params(ParamSet& out, const std::string& prefix) const;
    Var apply(const Var& x) const; // (T,d) -> (T,out_channels)
};

struct HeadOutputs {
    Var fg_probs; // (M,1), sigmoid
    Var offsets;  // (M,2), ReLU
};

// Runs both heads over the fused sequence and keeps the first
// target_len positions (the decoder positions only feed context).
HeadOutputs predict_heads(const ConvHead& cls_head, const ConvHead& boundary_head,
                          const Var& fused, int64_t target_len);

Prediction to_prediction(const HeadOutputs& heads);

// One candidate segment per position: [(i - dL), (i + dR)] * period,
// clipped to [0, (M-1) * period], scored by the foreground probability.
std::vector<Segment> decode_segments(const Prediction& pred, double frame_period_sec);

// Greedy descending-score suppression; a candidate is dropped only when
// its IoU with a kept segment strictly exceeds the threshold. Ties in
// score prefer the earlier start, then the shorter segment.
std::vector<Segment> nms_1d(const std::vector<Segment>& segments, double iou_threshold = 0.7);

// Highest-score survivor; same tie rule as nms_1d. Throws on empty input.
Segment select_top1(const std::vector<Segment>& kept);

} // namespace matr

#endif
