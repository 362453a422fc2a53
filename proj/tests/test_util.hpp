#pragma once
// Test-side oracles, independent of the solver implementations they check.
// The transmit-power feasible interval is located by bisection on the raw
// delay/energy formulas (the solver inverts the rate in closed form instead),
// so the two routes share no code beyond the physics definitions.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>

#include "offsim/types.hpp"

namespace testutil {

inline double raw_rate(double p, double h, const offsim::RadioParams& radio) {
    return radio.bandwidth_hz * std::log2(1.0 + p * h / radio.noise_w);
}

inline double raw_delay(double p, double t_fixed, double bits, double h,
                        const offsim::RadioParams& radio) {
    return t_fixed + bits / raw_rate(p, h, radio);
}

inline double raw_energy(double p, double bits, double h, const offsim::RadioParams& radio) {
    return p * bits / raw_rate(p, h, radio);
}

// Feasible transmit-power interval [p_lo, p_hi], or nothing when no power
// meets both the deadline and the energy cap. Delay decreases and energy
// increases in p, so each bound is a monotone bisection.
inline std::optional<std::pair<double, double>> transmit_feasible_interval(
    const offsim::TaskSpec& task, double t_fixed, double h, const offsim::DeviceProfile& prof,
    const offsim::RadioParams& radio) {
    const double p_tiny = prof.p_max * 1e-15;

    // Upper bound from the energy cap.
    double p_hi;
    if (raw_energy(prof.p_max, task.size_bits, h, radio) <= prof.e_max) {
        p_hi = prof.p_max;
    } else if (raw_energy(p_tiny, task.size_bits, h, radio) > prof.e_max) {
        return std::nullopt;
    } else {
        double lo = p_tiny;
        double hi = prof.p_max;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (raw_energy(mid, task.size_bits, h, radio) <= prof.e_max) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        p_hi = lo;
    }

    // Lower bound from the deadline.
    if (raw_delay(p_hi, t_fixed, task.size_bits, h, radio) > task.deadline_s) return std::nullopt;
    double p_lo;
    if (raw_delay(p_tiny, t_fixed, task.size_bits, h, radio) <= task.deadline_s) {
        p_lo = p_tiny;
    } else {
        double lo = p_tiny;
        double hi = p_hi;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (raw_delay(mid, t_fixed, task.size_bits, h, radio) <= task.deadline_s) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        p_lo = hi;
    }
    return std::make_pair(p_lo, p_hi);
}

}  // namespace testutil
