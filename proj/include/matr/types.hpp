#ifndef MATR_TYPES_HPP
#define MATR_TYPES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace matr {

/* L x dim per-frame feature matrix sampled on a uniform time grid:
 * frame i sits at i * frame_period_sec seconds. */
struct FeatureSequence {
    std::string video_id;
    int64_t length = 0;
    int64_t dim = 0;
    std::vector<double> features; // row-major, length*dim
    double frame_period_sec = 2.0;

    const double* row(int64_t i) const { return features.data() + i * dim; }
    double* row(int64_t i) { return features.data() + i * dim; }
};

/* Per-position supervision: foreground flags over one contiguous frame
 * interval [start_frame, end_frame], and at each foreground position i
 * the offsets (i - start_frame, end_frame - i). */
struct MomentLabels {
    std::vector<uint8_t> fg;                      // length M
    std::vector<std::array<double, 2>> offsets;   // length M; meaningful where fg=1
    int64_t start_frame = 0;
    int64_t end_frame = 0;
};

/* Head outputs for one target video, already restricted to the M
 * per-frame positions. */
struct Prediction {
    std::vector<double> fg_probs;                 // in [0,1]
    std::vector<std::array<double, 2>> offsets;   // nonnegative (left, right)
};

struct Segment {
    double start_sec = 0;
    double end_sec = 0;
    double score = 0;
};

struct AnnotationRecord {
    std::string target_id;
    std::string query_id;
    double start_sec = 0;
    double end_sec = 0;
};

} // namespace matr

#endif
