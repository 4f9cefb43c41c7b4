#include <cmath>
#include <stdexcept>

#include "molexp/policy/adam.hpp"

namespace molexp::policy {

double Adam::current_lr() const {
    if (options_.scheduler_steps <= 0) return options_.lr;
    const long drops = step_ / options_.scheduler_steps;
    return options_.lr * std::pow(options_.gamma, static_cast<double>(drops));
}

void Adam::step(PolicyParams& params, PolicyParams& grads) {
    const double lr = current_lr();
    ++step_;
    const double t = static_cast<double>(step_);
    const double bc1 = 1.0 - std::pow(options_.beta1, t);
    const double bc2 = 1.0 - std::pow(options_.beta2, t);

    auto p_refs = params.tensors();
    auto g_refs = grads.tensors();
    auto m_refs = m_.tensors();
    auto v_refs = v_.tensors();
    for (std::size_t i = 0; i < p_refs.size(); ++i) {
        auto& p = *p_refs[i].tensor;
        auto& g = *g_refs[i].tensor;
        auto& m = *m_refs[i].tensor;
        auto& v = *v_refs[i].tensor;
        m = options_.beta1 * m + (1.0 - options_.beta1) * g;
        v = (options_.beta2 * v.array() + (1.0 - options_.beta2) * g.array().square()).matrix();
        p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + options_.eps);
    }
    if (!params.all_finite())
        throw std::runtime_error("non-finite parameters after optimizer step " + std::to_string(step_));
}

}  // namespace molexp::policy
