#include "matr/array.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace matr {

int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

namespace {

[[noreturn]] void shape_error(const std::string& op, const std::string& detail) {
    throw std::invalid_argument(op + ": " + detail);
}

void require_matrix(const Var& x, const char* op) {
    if (x->shape.size() != 2) shape_error(op, "expected 2-D array, got " + shape_str(x->shape));
}

Var make_node(Shape shape) {
    auto out = std::make_shared<Array>();
    out->shape = std::move(shape);
    out->data.assign(static_cast<size_t>(shape_numel(out->shape)), 0.0);
    return out;
}

bool any_requires_grad(std::initializer_list<Var> vars) {
    for (const auto& v : vars)
        if (v->requires_grad) return true;
    return false;
}

} // namespace

Var Array::from(Shape shape, std::vector<double> data, bool requires_grad) {
    if (shape_numel(shape) != static_cast<int64_t>(data.size()))
        shape_error("Array::from", "data length " + std::to_string(data.size()) +
                                       " does not match shape " + shape_str(shape));
    auto out = std::make_shared<Array>();
    out->shape = std::move(shape);
    out->data = std::move(data);
    out->requires_grad = requires_grad;
    return out;
}

Var Array::zeros(Shape shape, bool requires_grad) {
    auto out = make_node(std::move(shape));
    out->requires_grad = requires_grad;
    return out;
}

Var Array::full(Shape shape, double value, bool requires_grad) {
    auto out = make_node(std::move(shape));
    std::fill(out->data.begin(), out->data.end(), value);
    out->requires_grad = requires_grad;
    return out;
}

Var Array::scalar(double value, bool requires_grad) {
    return Array::from({1}, {value}, requires_grad);
}

int64_t Array::numel() const { return static_cast<int64_t>(data.size()); }

int64_t Array::rows() const { return shape.empty() ? 1 : shape.front(); }

int64_t Array::cols() const { return shape.empty() ? 1 : shape.back(); }

double Array::value() const {
    if (data.size() != 1)
        throw std::invalid_argument("Array::value: array has " + std::to_string(data.size()) +
                                    " elements, expected 1");
    return data[0];
}

void Array::ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

void Array::zero_grad() { grad.assign(data.size(), 0.0); }

void check_finite(const Array& a, const char* op) {
    for (double v : a.data)
        if (!std::isfinite(v))
            throw std::runtime_error(std::string(op) + ": non-finite value in output");
}

void backward(const Var& loss) {
    if (!loss) throw std::invalid_argument("backward: null loss");
    if (loss->numel() != 1)
        throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                    shape_str(loss->shape));

    // post-order over parent edges; reversed gives a valid execution
    // order where each node runs before any of its inputs
    std::vector<Array*> order;
    std::unordered_set<Array*> visited;
    struct Frame {
        Array* node;
        size_t next;
    };
    std::vector<Frame> stack{{loss.get(), 0}};
    visited.insert(loss.get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < f.node->parents.size()) {
            Array* p = f.node->parents[f.next++].get();
            if (visited.insert(p).second) stack.push_back({p, 0});
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    loss->ensure_grad();
    loss->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backward_fn) (*it)->backward_fn(**it);
}

// ---------------------------------------------------------------- matmul

Var matmul(const Var& a, const Var& b) {
    require_matrix(a, "matmul");
    require_matrix(b, "matmul");
    const int64_t m = a->shape[0], k = a->shape[1], k2 = b->shape[0], n = b->shape[1];
    if (k != k2)
        shape_error("matmul", "shape mismatch " + shape_str(a->shape) + " x " + shape_str(b->shape));
    auto out = make_node({m, n});
    const double* A = a->data.data();
    const double* B = b->data.data();
    double* Y = out->data.data();
    for (int64_t i = 0; i < m; ++i) {
        double* yi = Y + i * n;
        const double* ai = A + i * k;
        for (int64_t kk = 0; kk < k; ++kk) {
            const double av = ai[kk];
            const double* bk = B + kk * n;
            for (int64_t j = 0; j < n; ++j) yi[j] += av * bk[j];
        }
    }
    if (any_requires_grad({a, b})) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b, m, k, n](Array& self) {
            const double* G = self.grad.data();
            if (a->requires_grad) {
                a->ensure_grad();
                const double* B = b->data.data();
                for (int64_t i = 0; i < m; ++i) {
                    double* ga = a->grad.data() + i * k;
                    const double* gi = G + i * n;
                    for (int64_t kk = 0; kk < k; ++kk) {
                        const double* bk = B + kk * n;
                        double s = 0;
                        for (int64_t j = 0; j < n; ++j) s += gi[j] * bk[j];
                        ga[kk] += s;
                    }
                }
            }
            if (b->requires_grad) {
                b->ensure_grad();
                const double* A = a->data.data();
                for (int64_t i = 0; i < m; ++i) {
                    const double* gi = G + i * n;
                    const double* ai = A + i * k;
                    for (int64_t kk = 0; kk < k; ++kk) {
                        const double av = ai[kk];
                        double* gb = b->grad.data() + kk * n;
                        for (int64_t j = 0; j < n; ++j) gb[j] += av * gi[j];
                    }
                }
            }
        };
    }
    return out;
}

Var matmul_nt(const Var& a, const Var& b) {
    require_matrix(a, "matmul_nt");
    require_matrix(b, "matmul_nt");
    const int64_t m = a->shape[0], k = a->shape[1], n = b->shape[0];
    if (k != b->shape[1])
        shape_error("matmul_nt",
                    "shape mismatch " + shape_str(a->shape) + " x " + shape_str(b->shape) + "^T");
    auto out = make_node({m, n});
    const double* A = a->data.data();
    const double* B = b->data.data();
    double* Y = out->data.data();
    for (int64_t i = 0; i < m; ++i) {
        const double* ai = A + i * k;
        double* yi = Y + i * n;
        for (int64_t j = 0; j < n; ++j) {
            const double* bj = B + j * k;
            double s = 0;
            for (int64_t kk = 0; kk < k; ++kk) s += ai[kk] * bj[kk];
            yi[j] = s;
        }
    }
    if (any_requires_grad({a, b})) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b, m, k, n](Array& self) {
            const double* G = self.grad.data();
            if (a->requires_grad) {
                a->ensure_grad();
                const double* B = b->data.data();
                for (int64_t i = 0; i < m; ++i) {
                    double* ga = a->grad.data() + i * k;
                    const double* gi = G + i * n;
                    for (int64_t j = 0; j < n; ++j) {
                        const double g = gi[j];
                        const double* bj = B + j * k;
                        for (int64_t kk = 0; kk < k; ++kk) ga[kk] += g * bj[kk];
                    }
                }
            }
            if (b->requires_grad) {
                b->ensure_grad();
                const double* A = a->data.data();
                for (int64_t i = 0; i < m; ++i) {
                    const double* gi = G + i * n;
                    const double* ai = A + i * k;
                    for (int64_t j = 0; j < n; ++j) {
                        const double g = gi[j];
                        double* gb = b->grad.data() + j * k;
                        for (int64_t kk = 0; kk < k; ++kk) gb[kk] += g * ai[kk];
                    }
                }
            }
        };
    }
    return out;
}

// ----------------------------------------------------------- elementwise

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (a->shape != b->shape)
        shape_error(op, "shape mismatch " + shape_str(a->shape) + " vs " + shape_str(b->shape));
}

} // namespace

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    auto out = make_node(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) out->data[i] = a->data[i] + b->data[i];
    if (any_requires_grad({a, b})) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b](Array& self) {
            if (a->requires_grad) {
                a->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i) a->grad[i] += self.grad[i];
            }
            if (b->requires_grad) {
                b->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i) b->grad[i] += self.grad[i];
            }
        };
    }
    return out;
}

Var sub(const Var& a, const Var& b) { return add(a, scale(b, -1.0)); }

Var mul(const Var& a, const Var& b) {
    require_same_shape(a, b, "mul");
    auto out = make_node(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) out->data[i] = a->data[i] * b->data[i];
    if (any_requires_grad({a, b})) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b](Array& self) {
            if (a->requires_grad) {
                a->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    a->grad[i] += self.grad[i] * b->data[i];
            }
            if (b->requires_grad) {
                b->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    b->grad[i] += self.grad[i] * a->data[i];
            }
        };
    }
    return out;
}

Var scale(const Var& a, double s) {
    auto out = make_node(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) out->data[i] = a->data[i] * s;
    if (a->requires_grad) {
        out->requires_grad = true;
        out->parents = {a};
        out->backward_fn = [a, s](Array& self) {
            a->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i) a->grad[i] += self.grad[i] * s;
        };
    }
    return out;
}

Var add_rowvec(const Var& a, const Var& v) {
    require_matrix(a, "add_rowvec");
    const int64_t m = a->shape[0], n = a->shape[1];
    if (v->numel() != n)
        shape_error("add_rowvec",
                    "bias length " + std::to_string(v->numel()) + " vs cols " + std::to_string(n));
    auto out = make_node(a->shape);
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) out->data[i * n + j] = a->data[i * n + j] + v->data[j];
    if (any_requires_grad({a, v})) {
        out->requires_grad = true;
        out->parents = {a, v};
        out->backward_fn = [a, v, m, n](Array& self) {
            if (a->requires_grad) {
                a->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i) a->grad[i] += self.grad[i];
            }
            if (v->requires_grad) {
                v->ensure_grad();
                for (int64_t i = 0; i < m; ++i)
                    for (int64_t j = 0; j < n; ++j) v->grad[j] += self.grad[i * n + j];
            }
        };
    }
    return out;
}

Var relu(const Var& a) {
    auto out = make_node(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) out->data[i] = a->data[i] > 0 ? a->data[i] : 0.0;
    if (a->requires_grad) {
        out->requires_grad = true;
        out->parents = {a};
        out->backward_fn = [a](Array& self) {
            a->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i)
                if (a->data[i] > 0) a->grad[i] += self.grad[i];
        };
    }
    return out;
}

Var sigmoid(const Var& a) {
    auto out = make_node(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) out->data[i] = 1.0 / (1.0 + std::exp(-a->data[i]));
    if (a->requires_grad) {
        out->requires_grad = true;
        out->parents = {a};
        out->backward_fn = [a](Array& self) {
            a->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i) {
                const double y = self.data[i];
                a->grad[i] += self.grad[i] * y * (1.0 - y);
            }
        };
    }
    return out;
}

Var softmax_rows(const Var& a) {
    const int64_t n = a->cols();
    const int64_t m = a->numel() / n;
    auto out = make_node(a->shape);
    for (int64_t i = 0; i < m; ++i) {
        const double* xi = a->data.data() + i * n;
        double* yi = out->data.data() + i * n;
        double mx = xi[0];
        for (int64_t j = 1; j < n; ++j) mx = std::max(mx, xi[j]);
        double z = 0;
        for (int64_t j = 0; j < n; ++j) {
            yi[j] = std::exp(xi[j] - mx);
            z += yi[j];
        }
        for (int64_t j = 0; j < n; ++j) yi[j] /= z;
    }
    if (a->requires_grad) {
        out->requires_grad = true;
        out->parents = {a};
        out->backward_fn = [a, m, n](Array& self) {
            a->ensure_grad();
            for (int64_t i = 0; i < m; ++i) {
                const double* y = self.data.data() + i * n;
                const double* g = self.grad.data() + i * n;
                double dot = 0;
                for (int64_t j = 0; j < n; ++j) dot += g[j] * y[j];
                double* ga = a->grad.data() + i * n;
                for (int64_t j = 0; j < n; ++j) ga[j] += y[j] * (g[j] - dot);
            }
        };
    }
    return out;
}

Var layer_norm_rows(const Var& x, const Var& gain, const Var& bias, double eps) {
    const int64_t n = x->cols();
    const int64_t m = x->numel() / n;
    if (gain->numel() != n || bias->numel() != n)
        shape_error("layer_norm", "gain/bias length must equal last axis " + std::to_string(n));
    auto out = make_node(x->shape);
    std::vector<double> xhat(static_cast<size_t>(m * n));
    std::vector<double> inv_std(static_cast<size_t>(m));
    for (int64_t i = 0; i < m; ++i) {
        const double* xi = x->data.data() + i * n;
        double mu = 0;
        for (int64_t j = 0; j < n; ++j) mu += xi[j];
        mu /= static_cast<double>(n);
        double var = 0;
        for (int64_t j = 0; j < n; ++j) var += (xi[j] - mu) * (xi[j] - mu);
        var /= static_cast<double>(n);
        const double istd = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(i)] = istd;
        for (int64_t j = 0; j < n; ++j) {
            const double h = (xi[j] - mu) * istd;
            xhat[static_cast<size_t>(i * n + j)] = h;
            out->data[static_cast<size_t>(i * n + j)] = h * gain->data[j] + bias->data[j];
        }
    }
    if (any_requires_grad({x, gain, bias})) {
        out->requires_grad = true;
        out->parents = {x, gain, bias};
        out->backward_fn = [x, gain, bias, m, n, xhat = std::move(xhat),
                            inv_std = std::move(inv_std)](Array& self) {
            if (gain->requires_grad) gain->ensure_grad();
            if (bias->requires_grad) bias->ensure_grad();
            if (x->requires_grad) x->ensure_grad();
            for (int64_t i = 0; i < m; ++i) {
                const double* g = self.grad.data() + i * n;
                const double* h = xhat.data() + i * n;
                if (gain->requires_grad)
                    for (int64_t j = 0; j < n; ++j) gain->grad[j] += g[j] * h[j];
                if (bias->requires_grad)
                    for (int64_t j = 0; j < n; ++j) bias->grad[j] += g[j];
                if (x->requires_grad) {
                    double mean_dh = 0, mean_dh_h = 0;
                    for (int64_t j = 0; j < n; ++j) {
                        const double dh = g[j] * gain->data[j];
                        mean_dh += dh;
                        mean_dh_h += dh * h[j];
                    }
                    mean_dh /= static_cast<double>(n);
                    mean_dh_h /= static_cast<double>(n);
                    const double istd = inv_std[static_cast<size_t>(i)];
                    double* gx = x->grad.data() + i * n;
                    for (int64_t j = 0; j < n; ++j) {
                        const double dh = g[j] * gain->data[j];
                        gx[j] += istd * (dh - mean_dh - h[j] * mean_dh_h);
                    }
                }
            }
        };
    }
    return out;
}

Var dropout(const Var& x, double p, RandomSource* rng, bool training) {
    if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("dropout: probability must be in [0,1), got " +
                                    std::to_string(p));
    if (!training || p == 0.0) return x; // identity in evaluation mode
    if (!rng) throw std::invalid_argument("dropout: training mode requires a RandomSource");
    auto out = make_node(x->shape);
    // inverted scaling: kept activations are divided by the keep
    // probability so evaluation needs no rescaling
    const double inv_keep = 1.0 / (1.0 - p);
    std::vector<double> mask(x->data.size());
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = rng->uniform() >= p ? inv_keep : 0.0;
    for (size_t i = 0; i < mask.size(); ++i) out->data[i] = x->data[i] * mask[i];
    if (x->requires_grad) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, mask = std::move(mask)](Array& self) {
            x->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i) x->grad[i] += self.grad[i] * mask[i];
        };
    }
    return out;
}

Var conv1d_same3(const Var& x, const Var& w, const Var& b) {
    require_matrix(x, "conv1d");
    require_matrix(w, "conv1d");
    const int64_t t_len = x->shape[0], c_in = x->shape[1];
    const int64_t c_out = w->shape[1];
    if (w->shape[0] != 3 * c_in)
        shape_error("conv1d", "kernel rows " + std::to_string(w->shape[0]) + " != 3*C_in " +
                                  std::to_string(3 * c_in));
    if (b->numel() != c_out)
        shape_error("conv1d", "bias length " + std::to_string(b->numel()) + " vs channels " +
                                  std::to_string(c_out));
    auto out = make_node({t_len, c_out});
    for (int64_t t = 0; t < t_len; ++t) {
        double* yt = out->data.data() + t * c_out;
        for (int64_t o = 0; o < c_out; ++o) yt[o] = b->data[o];
        for (int64_t k = 0; k < 3; ++k) {
            const int64_t tt = t + k - 1; // zero padding at both ends
            if (tt < 0 || tt >= t_len) continue;
            const double* xt = x->data.data() + tt * c_in;
            for (int64_t c = 0; c < c_in; ++c) {
                const double xv = xt[c];
                const double* wr = w->data.data() + (k * c_in + c) * c_out;
                for (int64_t o = 0; o < c_out; ++o) yt[o] += xv * wr[o];
            }
        }
    }
    if (any_requires_grad({x, w, b})) {
        out->requires_grad = true;
        out->parents = {x, w, b};
        out->backward_fn = [x, w, b, t_len, c_in, c_out](Array& self) {
            if (x->requires_grad) x->ensure_grad();
            if (w->requires_grad) w->ensure_grad();
            if (b->requires_grad) {
                b->ensure_grad();
                for (int64_t t = 0; t < t_len; ++t)
                    for (int64_t o = 0; o < c_out; ++o) b->grad[o] += self.grad[t * c_out + o];
            }
            for (int64_t t = 0; t < t_len; ++t) {
                const double* gt = self.grad.data() + t * c_out;
                for (int64_t k = 0; k < 3; ++k) {
                    const int64_t tt = t + k - 1;
                    if (tt < 0 || tt >= t_len) continue;
                    const double* xt = x->data.data() + tt * c_in;
                    for (int64_t c = 0; c < c_in; ++c) {
                        const double* wr = w->data.data() + (k * c_in + c) * c_out;
                        if (x->requires_grad) {
                            double s = 0;
                            for (int64_t o = 0; o < c_out; ++o) s += gt[o] * wr[o];
                            x->grad[tt * c_in + c] += s;
                        }
                        if (w->requires_grad) {
                            double* gw = w->grad.data() + (k * c_in + c) * c_out;
                            const double xv = xt[c];
                            for (int64_t o = 0; o < c_out; ++o) gw[o] += xv * gt[o];
                        }
                    }
                }
            }
        };
    }
    return out;
}

Var concat(const std::vector<Var>& parts, int axis) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    if (axis != 0 && axis != 1) throw std::invalid_argument("concat: axis must be 0 or 1");
    for (const auto& p : parts) require_matrix(p, "concat");
    const int64_t fixed = axis == 0 ? parts[0]->shape[1] : parts[0]->shape[0];
    int64_t total = 0;
    for (const auto& p : parts) {
        const int64_t f = axis == 0 ? p->shape[1] : p->shape[0];
        if (f != fixed)
            shape_error("concat", "incompatible part shape " + shape_str(p->shape));
        total += axis == 0 ? p->shape[0] : p->shape[1];
    }
    Shape out_shape = axis == 0 ? Shape{total, fixed} : Shape{fixed, total};
    auto out = make_node(out_shape);
    if (axis == 0) {
        int64_t row = 0;
        for (const auto& p : parts) {
            std::copy(p->data.begin(), p->data.end(), out->data.begin() + row * fixed);
            row += p->shape[0];
        }
    } else {
        int64_t col = 0;
        for (const auto& p : parts) {
            const int64_t pc = p->shape[1];
            for (int64_t i = 0; i < fixed; ++i)
                std::copy(p->data.begin() + i * pc, p->data.begin() + (i + 1) * pc,
                          out->data.begin() + i * total + col);
            col += pc;
        }
    }
    bool needs = false;
    for (const auto& p : parts) needs |= p->requires_grad;
    if (needs) {
        out->requires_grad = true;
        out->parents = parts;
        out->backward_fn = [parts, axis, fixed, total](Array& self) {
            int64_t offset = 0;
            for (const auto& p : parts) {
                if (axis == 0) {
                    const int64_t nrows = p->shape[0];
                    if (p->requires_grad) {
                        p->ensure_grad();
                        for (int64_t i = 0; i < nrows * fixed; ++i)
                            p->grad[i] += self.grad[offset * fixed + i];
                    }
                    offset += nrows;
                } else {
                    const int64_t pc = p->shape[1];
                    if (p->requires_grad) {
                        p->ensure_grad();
                        for (int64_t i = 0; i < fixed; ++i)
                            for (int64_t j = 0; j < pc; ++j)
                                p->grad[i * pc + j] += self.grad[i * total + offset + j];
                    }
                    offset += pc;
                }
            }
        };
    }
    return out;
}

Var slice(const Var& x, int axis, int64_t begin, int64_t end) {
    require_matrix(x, "slice");
    if (axis != 0 && axis != 1) throw std::invalid_argument("slice: axis must be 0 or 1");
    const int64_t extent = x->shape[axis];
    if (begin < 0 || end > extent || begin >= end)
        shape_error("slice", "range [" + std::to_string(begin) + "," + std::to_string(end) +
                                 ") out of bounds for axis extent " + std::to_string(extent));
    const int64_t m = x->shape[0], n = x->shape[1];
    Shape out_shape = axis == 0 ? Shape{end - begin, n} : Shape{m, end - begin};
    auto out = make_node(out_shape);
    if (axis == 0) {
        std::copy(x->data.begin() + begin * n, x->data.begin() + end * n, out->data.begin());
    } else {
        const int64_t w = end - begin;
        for (int64_t i = 0; i < m; ++i)
            std::copy(x->data.begin() + i * n + begin, x->data.begin() + i * n + end,
                      out->data.begin() + i * w);
    }
    if (x->requires_grad) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, axis, begin, m, n](Array& self) {
            x->ensure_grad();
            if (axis == 0) {
                for (size_t i = 0; i < self.grad.size(); ++i)
                    x->grad[begin * n + static_cast<int64_t>(i)] += self.grad[i];
            } else {
                const int64_t w = self.shape[1];
                for (int64_t i = 0; i < m; ++i)
                    for (int64_t j = 0; j < w; ++j)
                        x->grad[i * n + begin + j] += self.grad[i * w + j];
            }
        };
    }
    return out;
}

Var reshape(const Var& x, Shape shape) {
    if (shape_numel(shape) != x->numel())
        shape_error("reshape", "cannot reshape " + shape_str(x->shape) + " to " + shape_str(shape));
    auto out = Array::from(std::move(shape), x->data);
    if (x->requires_grad) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x](Array& self) {
            x->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i) x->grad[i] += self.grad[i];
        };
    }
    return out;
}

Var sum_all(const Var& x) {
    double s = 0;
    for (double v : x->data) s += v;
    auto out = Array::scalar(s);
    if (x->requires_grad) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x](Array& self) {
            x->ensure_grad();
            const double g = self.grad[0];
            for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += g;
        };
    }
    return out;
}

Var mean_all(const Var& x) { return scale(sum_all(x), 1.0 / static_cast<double>(x->numel())); }

Var xavier_init(const Shape& shape, RandomSource& rng, bool requires_grad) {
    if (shape.size() < 2)
        throw std::invalid_argument("xavier_init: weight shape needs >= 2 axes, got " +
                                    shape_str(shape));
    const double fan_in = static_cast<double>(shape.front());
    const double fan_out = static_cast<double>(shape.back());
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    auto out = Array::zeros(shape, requires_grad);
    for (auto& v : out->data) v = rng.uniform(-bound, bound);
    return out;
}

} // namespace matr
