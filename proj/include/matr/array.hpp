#ifndef MATR_ARRAY_HPP
#define MATR_ARRAY_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "matr/random.hpp"

namespace matr {

class Array;
using Var = std::shared_ptr<Array>;
using Shape = std::vector<int64_t>;

/*
 * Dense row-major array of 64-bit floats plus the reverse-mode tape.
 * Nodes own their inputs through `parents`, so a graph stays alive as
 * long as its root does; leaves (parameters, inputs) outlive graphs.
 */
class Array {
public:
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad; // sized lazily by ensure_grad()
    bool requires_grad = false;

    std::vector<Var> parents;
    std::function<void(Array&)> backward_fn;

    static Var from(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Var zeros(Shape shape, bool requires_grad = false);
    static Var full(Shape shape, double value, bool requires_grad = false);
    static Var scalar(double value, bool requires_grad = false);

    int64_t numel() const;
    int64_t rows() const; // first axis (1 for scalars)
    int64_t cols() const; // last axis
    bool is_matrix() const { return shape.size() == 2; }
    double value() const; // single-element accessor

    void ensure_grad();
    void zero_grad();
};

// Runs reverse-mode accumulation from a scalar loss. Every reachable
// node with requires_grad receives its gradient; leaf gradients
// accumulate across repeated calls until zero_grad().
void backward(const Var& loss);

// ---- forward ops (each records its backward closure on the tape) ----

Var matmul(const Var& a, const Var& b);    // (m,k) x (k,n)
Var matmul_nt(const Var& a, const Var& b); // (m,k) x (n,k)^T -> (m,n)
Var add(const Var& a, const Var& b);       // same shape
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);       // elementwise
Var scale(const Var& a, double s);
Var add_rowvec(const Var& a, const Var& v); // a: (m,n), v: (n) broadcast over rows
Var relu(const Var& a);
Var sigmoid(const Var& a);
Var softmax_rows(const Var& a);            // softmax over the last axis
Var layer_norm_rows(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
Var dropout(const Var& x, double p, RandomSource* rng, bool training);
Var conv1d_same3(const Var& x, const Var& w, const Var& b); // x:(T,C), w:(3C,Co), b:(Co)
Var concat(const std::vector<Var>& parts, int axis);        // 2-D, axis 0 or 1
Var slice(const Var& x, int axis, int64_t begin, int64_t end); // rows/cols [begin,end)
Var reshape(const Var& x, Shape shape);
Var sum_all(const Var& x);  // scalar
Var mean_all(const Var& x); // scalar

// Xavier/Glorot uniform: +-sqrt(6/(fan_in+fan_out)) over the first/last axes.
Var xavier_init(const Shape& shape, RandomSource& rng, bool requires_grad = true);

// Internal helpers shared by the op implementations.
int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);
void check_finite(const Array& a, const char* op);

} // namespace matr

#endif
