#ifndef MATR_ALIGNMENT_HPP
#define MATR_ALIGNMENT_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "matr/array.hpp"

namespace matr {

/*
 * Everything soft-DTW produces for one (target, query) pair. dp is the
 * (M+1)x(N+1) padded recursion table; expected_alignment is the
 * gradient of the soft cost with respect to the cost matrix (entries in
 * [0,1]); binary_path is the classical DTW backtracking path on the
 * same costs, from which the contiguous target span is read off.
 */
struct AlignmentResult {
    int64_t rows = 0; // M, target frames
    int64_t cols = 0; // N, query frames
    double gamma = 0;
    double soft_cost = 0;
    double hard_cost = 0;
    std::vector<double> dp;                 // (M+1)*(N+1)
    std::vector<double> expected_alignment; // M*N
    std::vector<uint8_t> binary_path;       // M*N, 0/1
    std::optional<std::pair<int64_t, int64_t>> span; // inclusive target-frame interval
};

// Cosine-distance cost matrix C[i][j] = 1 - cos(target_i, query_j),
// differentiable in both feature sequences. Zero-norm rows get cost 1
// with zero gradient.
Var cosine_cost(const Var& target, const Var& query);

// Smoothed DP value, table and expected alignment for a plain cost
// matrix (no tape involved).
struct SoftDtwValue {
    double soft_cost;
    std::vector<double> dp;
};
SoftDtwValue soft_dtw_forward(const double* cost, int64_t m, int64_t n, double gamma);
std::vector<double> soft_dtw_expected(const double* cost, const std::vector<double>& dp, int64_t m,
                                      int64_t n, double gamma);

struct HardDtwValue {
    double cost;
    std::vector<uint8_t> path; // m*n
};
HardDtwValue hard_dtw(const double* cost, int64_t m, int64_t n);

// Differentiable scalar soft-DTW cost of a cost-matrix node; the
// gradient into the costs is the expected alignment matrix.
Var soft_dtw_cost(const Var& cost, double gamma);

// Full inspection bundle for a plain cost matrix.
AlignmentResult align_cost_matrix(const double* cost, int64_t m, int64_t n, double gamma);

// First/last target rows touched by a binary path; throws on an all-zero matrix.
std::pair<int64_t, int64_t> extract_span(const std::vector<uint8_t>& binary_path, int64_t m,
                                         int64_t n);

// soft_dtw(cosine_cost(target, query)) as one differentiable scalar.
Var alignment_loss(const Var& target, const Var& query, double gamma);

// Loss node plus the inspection bundle computed on the same costs.
struct AlignmentOutput {
    Var loss;
    AlignmentResult result;
};
AlignmentOutput align_pair(const Var& target, const Var& query, double gamma);

} // namespace matr

#endif
