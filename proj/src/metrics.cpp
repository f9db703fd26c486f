#include "matr/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace matr {

double temporal_iou(const Segment& a, const Segment& b) {
    const double inter =
        std::max(0.0, std::min(a.end_sec, b.end_sec) - std::max(a.start_sec, b.start_sec));
    const double uni = (a.end_sec - a.start_sec) + (b.end_sec - b.start_sec) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

EvalReport evaluate(const std::vector<PredictionRecord>& predictions,
                    const std::vector<AnnotationRecord>& ground_truth) {
    using Key = std::pair<std::string, std::string>;
    std::map<Key, Segment> gt;
    for (const auto& a : ground_truth) {
        if (!(a.end_sec > a.start_sec))
            throw std::runtime_error("evaluate: zero-length ground-truth moment for (" +
                                     a.target_id + "," + a.query_id + ")");
        gt[{a.target_id, a.query_id}] = {a.start_sec, a.end_sec, 1.0};
    }

    std::map<Key, Segment> preds;
    std::vector<std::string> unknown;
    for (const auto& p : predictions) {
        Key key{p.target_id, p.query_id};
        if (!gt.count(key)) unknown.push_back("(" + p.target_id + "," + p.query_id + ")");
        preds[key] = p.top1;
    }
    if (!unknown.empty()) {
        std::string msg = "evaluate: predictions without ground truth:";
        for (const auto& u : unknown) msg += " " + u;
        throw std::runtime_error(msg);
    }

    EvalReport report;
    double iou_sum = 0;
    int64_t hits = 0;
    for (const auto& [key, seg] : gt) { // canonical id order
        EvalReport::Pair pair;
        pair.target_id = key.first;
        pair.query_id = key.second;
        pair.ground_truth = seg;
        auto it = preds.find(key);
        if (it != preds.end()) {
            pair.predicted = it->second;
            pair.iou = temporal_iou(it->second, seg);
        }
        iou_sum += pair.iou;
        if (pair.iou >= 0.5) ++hits;
        report.pairs.push_back(std::move(pair));
    }
    if (report.pairs.empty()) throw std::runtime_error("evaluate: empty ground truth");
    report.miou = iou_sum / static_cast<double>(report.pairs.size());
    report.recall_at_1 = static_cast<double>(hits) / static_cast<double>(report.pairs.size());
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["miou"] = report.miou;
    j["recall_at_1"] = report.recall_at_1;
    j["num_pairs"] = report.pairs.size();
    auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : report.pairs) {
        nlohmann::ordered_json pj;
        pj["target_id"] = p.target_id;
        pj["query_id"] = p.query_id;
        pj["gt"] = {p.ground_truth.start_sec, p.ground_truth.end_sec};
        if (p.predicted)
            pj["pred"] = {p.predicted->start_sec, p.predicted->end_sec, p.predicted->score};
        else
            pj["pred"] = nullptr;
        pj["iou"] = p.iou;
        pairs.push_back(std::move(pj));
    }
    return j.dump(2);
}

std::string report_to_text(const EvalReport& report) {
    std::ostringstream os;
    os << "pairs: " << report.pairs.size() << "\n";
    os << "mIoU:  " << report.miou << "\n";
    os << "R@1:   " << report.recall_at_1 << "  (IoU >= 0.5)\n";
    os << "----------------------------------------------------------------\n";
    os << "target_id\tquery_id\tgt\tpred\tiou\n";
    for (const auto& p : report.pairs) {
        os << p.target_id << "\t" << p.query_id << "\t[" << p.ground_truth.start_sec << ","
           << p.ground_truth.end_sec << "]\t";
        if (p.predicted)
            os << "[" << p.predicted->start_sec << "," << p.predicted->end_sec << "]";
        else
            os << "-";
        os << "\t" << p.iou << "\n";
    }
    return os.str();
}

} // namespace matr
