#include "matr/alignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace matr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -gamma * log(exp(-a/g) + exp(-b/g) + exp(-c/g)), stabilized
double softmin3(double a, double b, double c, double gamma) {
    const double m = std::min(a, std::min(b, c));
    if (!std::isfinite(m)) return m;
    const double s = std::exp((m - a) / gamma) + std::exp((m - b) / gamma) +
                     std::exp((m - c) / gamma);
    return m - gamma * std::log(s);
}

} // namespace

SoftDtwValue soft_dtw_forward(const double* cost, int64_t m, int64_t n, double gamma) {
    if (gamma <= 0)
        throw std::invalid_argument("soft_dtw: gamma must be positive, got " +
                                    std::to_string(gamma));
    if (m < 1 || n < 1) throw std::invalid_argument("soft_dtw: empty cost matrix");
    const int64_t w = n + 1;
    std::vector<double> dp(static_cast<size_t>((m + 1) * w), kInf);
    dp[0] = 0.0;
    for (int64_t i = 1; i <= m; ++i)
        for (int64_t j = 1; j <= n; ++j)
            dp[i * w + j] = cost[(i - 1) * n + (j - 1)] +
                            softmin3(dp[(i - 1) * w + j], dp[i * w + (j - 1)],
                                     dp[(i - 1) * w + (j - 1)], gamma);
    return {dp[m * w + n], std::move(dp)};
}

std::vector<double> soft_dtw_expected(const double* cost, const std::vector<double>& dp, int64_t m,
                                      int64_t n, double gamma) {
    // backward recursion of the soft-DTW gradient: E[i][j] is the
    // weight of cell (i,j) summed over all monotone paths
    const int64_t w = n + 1;
    const int64_t we = n + 2;
    std::vector<double> e(static_cast<size_t>((m + 2) * we), 0.0);
    std::vector<double> r(static_cast<size_t>((m + 2) * we), -kInf);
    for (int64_t i = 1; i <= m; ++i)
        for (int64_t j = 1; j <= n; ++j) r[i * we + j] = dp[i * w + j];
    r[(m + 1) * we + (n + 1)] = dp[m * w + n];
    e[(m + 1) * we + (n + 1)] = 1.0;

    auto cost_at = [&](int64_t i, int64_t j) -> double {
        // sentinel row/column carry zero cost
        if (i > m || j > n) return 0.0;
        return cost[(i - 1) * n + (j - 1)];
    };

    for (int64_t j = n; j >= 1; --j) {
        for (int64_t i = m; i >= 1; --i) {
            const double rij = r[i * we + j];
            const double a = std::exp((r[(i + 1) * we + j] - rij - cost_at(i + 1, j)) / gamma);
            const double b = std::exp((r[i * we + (j + 1)] - rij - cost_at(i, j + 1)) / gamma);
            const double c =
                std::exp((r[(i + 1) * we + (j + 1)] - rij - cost_at(i + 1, j + 1)) / gamma);
            e[i * we + j] = a * e[(i + 1) * we + j] + b * e[i * we + (j + 1)] +
                            c * e[(i + 1) * we + (j + 1)];
        }
    }

    std::vector<double> expected(static_cast<size_t>(m * n));
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) expected[i * n + j] = e[(i + 1) * we + (j + 1)];
    return expected;
}

HardDtwValue hard_dtw(const double* cost, int64_t m, int64_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("hard_dtw: empty cost matrix");
    const int64_t w = n + 1;
    std::vector<double> dp(static_cast<size_t>((m + 1) * w), kInf);
    dp[0] = 0.0;
    for (int64_t i = 1; i <= m; ++i)
        for (int64_t j = 1; j <= n; ++j)
            dp[i * w + j] =
                cost[(i - 1) * n + (j - 1)] +
                std::min(dp[(i - 1) * w + (j - 1)], std::min(dp[(i - 1) * w + j], dp[i * w + (j - 1)]));

    HardDtwValue out;
    out.cost = dp[m * w + n];
    out.path.assign(static_cast<size_t>(m * n), 0);
    // backtrack; ties prefer diagonal, then vertical
    int64_t i = m, j = n;
    while (true) {
        out.path[(i - 1) * n + (j - 1)] = 1;
        if (i == 1 && j == 1) break;
        const double diag = dp[(i - 1) * w + (j - 1)];
        const double vert = dp[(i - 1) * w + j];
        const double horz = dp[i * w + (j - 1)];
        if (diag <= vert && diag <= horz) {
            --i;
            --j;
        } else if (vert <= horz) {
            --i;
        } else {
            --j;
        }
    }
    return out;
}

std::pair<int64_t, int64_t> extract_span(const std::vector<uint8_t>& binary_path, int64_t m,
                                         int64_t n) {
    int64_t first = -1, last = -1;
    for (int64_t i = 0; i < m; ++i) {
        bool hit = false;
        for (int64_t j = 0; j < n; ++j)
            if (binary_path[i * n + j]) {
                hit = true;
                break;
            }
        if (hit) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) throw std::runtime_error("extract_span: alignment matrix has no matched cells");
    return {first, last};
}

Var cosine_cost(const Var& target, const Var& query) {
    if (target->shape.size() != 2 || query->shape.size() != 2)
        throw std::invalid_argument("cosine_cost: expected 2-D feature sequences");
    const int64_t m = target->shape[0], d = target->shape[1];
    const int64_t n = query->shape[0];
    if (query->shape[1] != d)
        throw std::invalid_argument("cosine_cost: feature dimension mismatch " +
                                    shape_str(target->shape) + " vs " + shape_str(query->shape));
    if (m < 1 || n < 1) throw std::invalid_argument("cosine_cost: empty sequence");

    std::vector<double> tn(static_cast<size_t>(m)), qn(static_cast<size_t>(n));
    for (int64_t i = 0; i < m; ++i) {
        double s = 0;
        for (int64_t k = 0; k < d; ++k) s += target->data[i * d + k] * target->data[i * d + k];
        tn[i] = std::sqrt(s);
    }
    for (int64_t j = 0; j < n; ++j) {
        double s = 0;
        for (int64_t k = 0; k < d; ++k) s += query->data[j * d + k] * query->data[j * d + k];
        qn[j] = std::sqrt(s);
    }

    auto out = Array::zeros({m, n});
    std::vector<double> cos(static_cast<size_t>(m * n), 0.0);
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double c = 0.0;
            if (tn[i] > 0 && qn[j] > 0) {
                double dot = 0;
                for (int64_t k = 0; k < d; ++k)
                    dot += target->data[i * d + k] * query->data[j * d + k];
                c = dot / (tn[i] * qn[j]);
                // clip rounding overshoot so costs stay in [0,2]
                c = std::min(1.0, std::max(-1.0, c));
            }
            cos[i * n + j] = c;
            out->data[i * n + j] = 1.0 - c;
        }
    }

    if (target->requires_grad || query->requires_grad) {
        out->requires_grad = true;
        out->parents = {target, query};
        out->backward_fn = [target, query, m, n, d, tn = std::move(tn), qn = std::move(qn),
                            cos = std::move(cos)](Array& self) {
            if (target->requires_grad) target->ensure_grad();
            if (query->requires_grad) query->ensure_grad();
            for (int64_t i = 0; i < m; ++i) {
                if (tn[i] <= 0) continue; // zero-norm rows carry no gradient
                for (int64_t j = 0; j < n; ++j) {
                    if (qn[j] <= 0) continue;
                    const double g = self.grad[i * n + j];
                    if (g == 0) continue;
                    const double c = cos[i * n + j];
                    if (target->requires_grad) {
                        double* gt = target->grad.data() + i * d;
                        const double* tv = target->data.data() + i * d;
                        const double* qv = query->data.data() + j * d;
                        const double a = c / (tn[i] * tn[i]);
                        const double b = 1.0 / (tn[i] * qn[j]);
                        for (int64_t k = 0; k < d; ++k) gt[k] += g * (a * tv[k] - b * qv[k]);
                    }
                    if (query->requires_grad) {
                        double* gq = query->grad.data() + j * d;
                        const double* tv = target->data.data() + i * d;
                        const double* qv = query->data.data() + j * d;
                        const double a = c / (qn[j] * qn[j]);
                        const double b = 1.0 / (tn[i] * qn[j]);
                        for (int64_t k = 0; k < d; ++k) gq[k] += g * (a * qv[k] - b * tv[k]);
                    }
                }
            }
        };
    }
    return out;
}

Var soft_dtw_cost(const Var& cost, double gamma) {
    if (cost->shape.size() != 2)
        throw std::invalid_argument("soft_dtw: expected 2-D cost matrix");
    const int64_t m = cost->shape[0], n = cost->shape[1];
    auto fwd = soft_dtw_forward(cost->data.data(), m, n, gamma);
    auto out = Array::scalar(fwd.soft_cost);
    if (cost->requires_grad) {
        out->requires_grad = true;
        out->parents = {cost};
        out->backward_fn = [cost, m, n, gamma, dp = std::move(fwd.dp)](Array& self) {
            cost->ensure_grad();
            const auto expected = soft_dtw_expected(cost->data.data(), dp, m, n, gamma);
            const double g = self.grad[0];
            for (size_t i = 0; i < expected.size(); ++i) cost->grad[i] += g * expected[i];
        };
    }
    return out;
}

AlignmentResult align_cost_matrix(const double* cost, int64_t m, int64_t n, double gamma) {
    AlignmentResult res;
    res.rows = m;
    res.cols = n;
    res.gamma = gamma;
    auto fwd = soft_dtw_forward(cost, m, n, gamma);
    res.soft_cost = fwd.soft_cost;
    res.expected_alignment = soft_dtw_expected(cost, fwd.dp, m, n, gamma);
    res.dp = std::move(fwd.dp);
    auto hard = hard_dtw(cost, m, n);
    res.hard_cost = hard.cost;
    res.binary_path = std::move(hard.path);
    res.span = extract_span(res.binary_path, m, n);
    return res;
}

Var alignment_loss(const Var& target, const Var& query, double gamma) {
    return soft_dtw_cost(cosine_cost(target, query), gamma);
}

AlignmentOutput align_pair(const Var& target, const Var& query, double gamma) {
    AlignmentOutput out;
    Var cost = cosine_cost(target, query);
    out.loss = soft_dtw_cost(cost, gamma);
    out.result = align_cost_matrix(cost->data.data(), cost->shape[0], cost->shape[1], gamma);
    return out;
}

} // namespace matr
