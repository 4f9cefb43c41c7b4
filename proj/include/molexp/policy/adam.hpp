#pragma once

#include "molexp/policy/model.hpp"

namespace molexp::policy {

// Adam with an optional step-decay schedule (lr halves every
// `scheduler_steps` updates by default; <= 0 disables decay).
class Adam {
public:
    struct Options {
        double lr = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
        int scheduler_steps = 0;
        double gamma = 0.5;
    };

    Adam() = default;
    Adam(const PolicyParams& params, Options options)
        : options_(options),
          m_(PolicyParams::zeros_like(params)),
          v_(PolicyParams::zeros_like(params)) {}

    double current_lr() const;
    long steps_taken() const { return step_; }

    // One update; throws if parameters stop being finite.
    void step(PolicyParams& params, PolicyParams& grads);

    const Options& options() const { return options_; }
    PolicyParams& moment1() { return m_; }
    PolicyParams& moment2() { return v_; }
    void restore(long step_count) { step_ = step_count; }

private:
    Options options_;
    PolicyParams m_, v_;
    long step_ = 0;
};

}  // namespace molexp::policy
