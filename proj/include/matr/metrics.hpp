#ifndef MATR_METRICS_HPP
#define MATR_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "matr/types.hpp"

namespace matr {

// |a∩b| / |a∪b| on the time axis; 0 when the union has zero length.
double temporal_iou(const Segment& a, const Segment& b);

struct PredictionRecord {
    std::string target_id;
    std::string query_id;
    Segment top1;
};

struct EvalReport {
    struct Pair {
        std::string target_id;
        std::string query_id;
        Segment ground_truth;
        std::optional<Segment> predicted;
        double iou = 0;
    };
    double miou = 0;
    double recall_at_1 = 0; // fraction with IoU >= 0.5
    std::vector<Pair> pairs; // sorted by (target_id, query_id)
};

// Scores predictions against annotations. Every prediction id must
// exist in the ground truth (unknown ids fail, listing them); ground
// truth pairs without a prediction count as IoU 0.
EvalReport evaluate(const std::vector<PredictionRecord>& predictions,
                    const std::vector<AnnotationRecord>& ground_truth);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

} // namespace matr

#endif
