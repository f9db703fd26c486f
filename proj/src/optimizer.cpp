#include "matr/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace matr {

void AdamW::step(ParamSet& params) {
    if (slots_.empty()) {
        slots_.resize(params.size());
        for (size_t i = 0; i < params.size(); ++i) {
            slots_[i].m.assign(params[i].value->data.size(), 0.0);
            slots_[i].v.assign(params[i].value->data.size(), 0.0);
        }
    }
    if (slots_.size() != params.size())
        throw std::invalid_argument("AdamW::step: parameter count changed after first step");

    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    const double decay = 1.0 - cfg_.learning_rate * cfg_.weight_decay;

    for (size_t p = 0; p < params.size(); ++p) {
        Array& a = *params[p].value;
        a.ensure_grad();
        if (a.data.size() != slots_[p].m.size())
            throw std::invalid_argument("AdamW::step: shape changed for parameter " +
                                        params[p].name);
        for (size_t i = 0; i < a.data.size(); ++i) {
            const double g = a.grad[i];
            if (std::isnan(g))
                throw std::runtime_error("AdamW::step: NaN gradient in parameter " +
                                         params[p].name);
            a.data[i] *= decay;
            double& m = slots_[p].m[i];
            double& v = slots_[p].v[i];
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
            v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            a.data[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void AdamW::restore(int64_t step, std::vector<Slot> slots) {
    step_ = step;
    slots_ = std::move(slots);
}

} // namespace matr
