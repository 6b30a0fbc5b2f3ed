#pragma once

#include <string>
#include <vector>

namespace lpsnn {

// Leaky integrate-and-fire neuron with an adaptive threshold: the effective
// firing threshold is v_th_base + theta, where theta grows by theta_inc on
// every spike and decays multiplicatively by theta_decay per step.
struct LifParams {
    double v_rest = -65.0;  // potential the membrane leaks toward
    double v_reset = -60.0; // potential after a spike
    double v_th_base = -52.0;
    double v_decay = 0.97;        // per-step multiplicative leak factor
    double theta_inc = 2.0;       // threshold adaptation added per spike
    double theta_decay = 0.999;   // per-step multiplicative theta decay
    int t_ref = 5;                // refractory duration, in steps
    double dt_ms = 1.0;

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (!(v_reset < v_th_base)) issues.push_back("lif: v_reset must be < v_th_base");
        if (!(v_rest <= v_reset)) issues.push_back("lif: v_rest must be <= v_reset");
        if (!(v_decay > 0.0 && v_decay <= 1.0)) issues.push_back("lif: v_decay must be in (0, 1]");
        if (!(theta_decay > 0.0 && theta_decay <= 1.0))
            issues.push_back("lif: theta_decay must be in (0, 1]");
        if (theta_inc < 0.0) issues.push_back("lif: theta_inc must be >= 0");
        if (t_ref < 0) issues.push_back("lif: t_ref must be >= 0");
        if (!(dt_ms > 0.0)) issues.push_back("lif: dt must be > 0");
        return issues;
    }
};

struct LifNeuronState {
    double v_mem = 0.0;
    double theta = 0.0; // adaptation accumulator, always >= 0
    int refractory_remaining = 0;
};

inline LifNeuronState rest_state(const LifParams& p) {
    return LifNeuronState{p.v_rest, 0.0, 0};
}

// One discrete timestep. While refractory, input is ignored and no spike can
// be emitted; otherwise the membrane leaks toward v_rest, integrates the
// input current, and spikes when it reaches v_th_base + theta (ties spike).
inline bool step_neuron(LifNeuronState& s, const LifParams& p, double input_current) {
    if (s.refractory_remaining > 0) {
        --s.refractory_remaining;
        s.v_mem = p.v_rest + (s.v_mem - p.v_rest) * p.v_decay;
        s.theta *= p.theta_decay;
        return false;
    }
    s.v_mem = p.v_rest + (s.v_mem - p.v_rest) * p.v_decay + input_current;
    s.theta *= p.theta_decay;
    if (s.v_mem >= p.v_th_base + s.theta) {
        s.v_mem = p.v_reset;
        s.theta += p.theta_inc;
        s.refractory_remaining = p.t_ref;
        return true;
    }
    return false;
}

} // namespace lpsnn
