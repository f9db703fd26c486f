#ifndef MATR_OPTIMIZER_HPP
#define MATR_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "matr/array.hpp"

namespace matr {

/* Named trainable parameter; ordering in a ParamSet is the registration
 * order and fixes both update order and checkpoint layout. */
struct Parameter {
    std::string name;
    Var value;
};

using ParamSet = std::vector<Parameter>;

struct AdamWConfig {
    double learning_rate = 1e-4;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/*
 * AdamW with decoupled weight decay: each step first shrinks the
 * parameter by lr*wd, then applies the bias-corrected Adam update.
 */
class AdamW {
public:
    explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

    const AdamWConfig& config() const { return cfg_; }
    int64_t step_count() const { return step_; }

    // consumes .grad of every parameter; throws on NaN gradients
    void step(ParamSet& params);

    // serialization hooks for checkpoints
    struct Slot {
        std::vector<double> m, v;
    };
    const std::vector<Slot>& slots() const { return slots_; }
    void restore(int64_t step, std::vector<Slot> slots);

private:
    AdamWConfig cfg_;
    int64_t step_ = 0;
    std::vector<Slot> slots_;
};

} // namespace matr

#endif
