#pragma once
// Per-step scalar subproblems that price an offloading action, plus the
// closed-form rate/delay/energy primitives and a grid-refinement oracle used
// to cross-check the solvers.

#include <functional>

#include "offsim/types.hpp"

namespace offsim {

struct DelayEnergy {
    double delay_s = 0.0;
    double energy_j = 0.0;
};

// Shannon-style link rate B*log2(1 + p*h/sigma^2) in bits/s. Zero at p = 0.
double transmission_rate(double p_w, double path_gain, const RadioParams& radio);

// Upload delay L/r and transmit energy p*L/r for one task. Requires p > 0.
DelayEnergy comm_delay_energy(double p_w, const TaskSpec& task, double path_gain,
                              const RadioParams& radio);

// Local execution delay C/f and chip energy kappa*f^2. Requires f > 0.
DelayEnergy local_delay_energy(double f_cps, const TaskSpec& task, const DeviceProfile& profile);

// Minimizes C/f + lambda*kappa*f^2 over the interval allowed by the CPU cap,
// the per-step energy cap and the deadline. Closed form: the stationary point
// (C/(2*lambda*kappa))^(1/3) clamped to the feasible interval; with lambda = 0
// the delay term alone drives f to the upper bound.
SolverResult solve_local_cpu(const TaskSpec& task, const DeviceProfile& profile);

// Minimizes t_fixed + (1 + lambda*p) * L/rate(p) over the transmit powers that
// meet the deadline and the energy cap, where t_fixed is the server compute
// delay (plus the cloud access delay for Action::Cloud). The deadline bound
// inverts the rate formula in closed form; the energy bound is located by
// bisection; the minimizer by golden-section search.
SolverResult solve_transmit_power(const TaskSpec& task, Action action, double path_gain,
                                  const DeviceProfile& profile, const RadioParams& radio,
                                  const ServerParams& servers);

struct ScalarMin {
    double argmin = 0.0;
    double min = 0.0;
};

// Exhaustive coarse grid over [lo, hi] followed by `refinements` passes that
// re-grid the two cells around the incumbent best point. Deterministic.
ScalarMin grid_refine_oracle(const std::function<double(double)>& objective, double lo, double hi,
                             int coarse_points, int refinements);

// Golden-section minimization of a unimodal objective on [lo, hi]. Tracks the
// best evaluated point including both endpoints, so boundary minima are exact.
ScalarMin golden_section_min(const std::function<double(double)>& objective, double lo, double hi,
                             double rel_tol = 1e-9, int max_iters = 200);

}  // namespace offsim
