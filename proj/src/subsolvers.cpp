#include "offsim/subsolvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace offsim {

namespace {

void check_task(const TaskSpec& task) {
    if (!(task.size_bits > 0.0) || !(task.cpu_cycles > 0.0) || !(task.deadline_s > 0.0)) {
        throw std::invalid_argument("task fields must be strictly positive");
    }
}

void check_radio(const RadioParams& radio) {
    if (!(radio.bandwidth_hz > 0.0) || !(radio.noise_w > 0.0)) {
        throw std::invalid_argument("radio parameters must be strictly positive");
    }
}

// Transmit energy p*L/rate(p), extended by continuity to p = 0 where the
// ratio tends to L*ln2*sigma^2/(B*h).
double comm_energy(double p_w, double size_bits, double path_gain, const RadioParams& radio) {
    if (p_w == 0.0) {
        return size_bits * radio.noise_w * std::numbers::ln2 / (radio.bandwidth_hz * path_gain);
    }
    return p_w * size_bits / transmission_rate(p_w, path_gain, radio);
}

}  // namespace

double transmission_rate(double p_w, double path_gain, const RadioParams& radio) {
    check_radio(radio);
    if (p_w < 0.0) throw std::domain_error("transmit power must be nonnegative");
    if (!(path_gain > 0.0)) throw std::domain_error("path gain must be strictly positive");
    // log2(1+x) via log1p for small-SNR accuracy.
    const double snr = p_w * path_gain / radio.noise_w;
    return radio.bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

DelayEnergy comm_delay_energy(double p_w, const TaskSpec& task, double path_gain,
                              const RadioParams& radio) {
    check_task(task);
    if (!(p_w > 0.0)) throw std::domain_error("transmit power must be strictly positive");
    const double rate = transmission_rate(p_w, path_gain, radio);
    const double delay = task.size_bits / rate;
    return {delay, p_w * delay};
}

DelayEnergy local_delay_energy(double f_cps, const TaskSpec& task, const DeviceProfile& profile) {
    check_task(task);
    if (!(f_cps > 0.0)) throw std::domain_error("CPU frequency must be strictly positive");
    return {task.cpu_cycles / f_cps, profile.kappa * f_cps * f_cps};
}

SolverResult solve_local_cpu(const TaskSpec& task, const DeviceProfile& profile) {
    check_task(task);
    if (!(profile.f_max > 0.0) || !(profile.e_max > 0.0) || !(profile.kappa > 0.0) ||
        profile.lambda_weight < 0.0) {
        throw std::invalid_argument("device profile limits must be positive");
    }

    const double f_lo = task.cpu_cycles / task.deadline_s;             // deadline
    const double f_hi = std::min(profile.f_max,                       // CPU cap
                                 std::sqrt(profile.e_max / profile.kappa));  // energy cap
    SolverResult result;
    if (f_lo > f_hi) return result;

    double f_star;
    if (profile.lambda_weight == 0.0) {
        f_star = f_hi;  // pure delay minimization
    } else {
        f_star = std::cbrt(task.cpu_cycles / (2.0 * profile.lambda_weight * profile.kappa));
        f_star = std::clamp(f_star, f_lo, f_hi);
    }

    result.feasible = true;
    result.optimizer = f_star;
    result.delay_s = task.cpu_cycles / f_star;
    result.energy_j = profile.kappa * f_star * f_star;
    result.cost = result.delay_s + profile.lambda_weight * result.energy_j;
    return result;
}

SolverResult solve_transmit_power(const TaskSpec& task, Action action, double path_gain,
                                  const DeviceProfile& profile, const RadioParams& radio,
                                  const ServerParams& servers) {
    check_task(task);
    check_radio(radio);
    if (action == Action::Local) throw std::invalid_argument("solve_transmit_power needs Edge or Cloud");
    if (!(path_gain > 0.0)) throw std::domain_error("path gain must be strictly positive");
    if (!(servers.f_edge > 0.0) || !(servers.f_cloud > 0.0) || servers.psi_s < 0.0) {
        throw std::invalid_argument("server parameters must be positive");
    }

    const double t_fixed = action == Action::Edge
                               ? task.cpu_cycles / servers.f_edge
                               : task.cpu_cycles / servers.f_cloud + servers.psi_s;
    SolverResult result;
    const double slack = task.deadline_s - t_fixed;
    if (slack <= 0.0) return result;  // server delay alone misses the deadline

    // Deadline bound: smallest p with rate(p) >= L/slack, by inverting the
    // rate formula. Nudged up one part in 1e12 so the recomputed delay cannot
    // round above the deadline.
    const double rate_needed = task.size_bits / slack;
    double p_lo = (std::exp2(rate_needed / radio.bandwidth_hz) - 1.0) * radio.noise_w / path_gain;
    p_lo *= 1.0 + 1e-12;

    // Energy bound: largest p in [0, p_max] with p*L/rate(p) <= e_max. The
    // energy is strictly increasing in p, so bisection applies; p_max is
    // accepted outright when even it meets the cap.
    double p_hi;
    if (comm_energy(profile.p_max, task.size_bits, path_gain, radio) <= profile.e_max) {
        p_hi = profile.p_max;
    } else if (comm_energy(0.0, task.size_bits, path_gain, radio) > profile.e_max) {
        return result;  // even vanishing power exceeds the energy cap
    } else {
        double lo = 0.0;
        double hi = profile.p_max;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (comm_energy(mid, task.size_bits, path_gain, radio) <= profile.e_max) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        p_hi = lo;
    }

    if (!std::isfinite(p_lo) || p_lo > p_hi) return result;

    const double lambda = profile.lambda_weight;
    auto objective = [&](double p) {
        const double t_comm = task.size_bits / transmission_rate(p, path_gain, radio);
        return t_fixed + t_comm + lambda * p * t_comm;
    };
    const ScalarMin best = golden_section_min(objective, p_lo, p_hi);

    const double p_star = best.argmin;
    const double t_comm = task.size_bits / transmission_rate(p_star, path_gain, radio);
    result.feasible = true;
    result.optimizer = p_star;
    result.delay_s = t_fixed + t_comm;
    result.energy_j = p_star * t_comm;
    result.cost = result.delay_s + lambda * result.energy_j;
    return result;
}

ScalarMin grid_refine_oracle(const std::function<double(double)>& objective, double lo, double hi,
                             int coarse_points, int refinements) {
    if (!(lo < hi)) throw std::domain_error("grid_refine_oracle: empty interval");
    if (coarse_points < 3) throw std::domain_error("grid_refine_oracle: need >= 3 grid points");
    if (refinements < 0) throw std::domain_error("grid_refine_oracle: negative refinement count");

    double a = lo;
    double b = hi;
    double best_x = lo;
    double best_f = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass <= refinements; ++pass) {
        const int n = coarse_points;
        int best_i = 0;
        double pass_f = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double x = a + (b - a) * i / (n - 1);
            const double f = objective(x);
            if (f < pass_f) {
                pass_f = f;
                best_i = i;
            }
        }
        const double pass_x = a + (b - a) * best_i / (n - 1);
        if (pass_f < best_f) {
            best_f = pass_f;
            best_x = pass_x;
        }
        const double next_a = a + (b - a) * std::max(0, best_i - 1) / (n - 1);
        const double next_b = a + (b - a) * std::min(n - 1, best_i + 1) / (n - 1);
        a = next_a;
        b = next_b;
    }
    return {best_x, best_f};
}

ScalarMin golden_section_min(const std::function<double(double)>& objective, double lo, double hi,
                             double rel_tol, int max_iters) {
    if (lo > hi) throw std::domain_error("golden_section_min: empty interval");
    if (lo == hi) return {lo, objective(lo)};

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double best_x = a;
    double best_f = objective(a);
    const double fb = objective(b);
    if (fb < best_f) {
        best_f = fb;
        best_x = b;
    }

    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    auto consider = [&](double x, double f) {
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    };
    consider(x1, f1);
    consider(x2, f2);

    for (int it = 0; it < max_iters && (b - a) > rel_tol * (std::abs(a) + std::abs(b)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = objective(x1);
            consider(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = objective(x2);
            consider(x2, f2);
        }
    }
    return {best_x, best_f};
}

}  // namespace offsim
