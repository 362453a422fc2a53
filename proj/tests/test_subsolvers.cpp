#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "offsim/rng.hpp"
#include "offsim/subsolvers.hpp"
#include "test_util.hpp"

using namespace offsim;

namespace {

const RadioParams kRadio{1e6, 1e-13};
const ServerParams kServers{1e10, 1e11, 0.2};

DeviceProfile default_profile() {
    DeviceProfile p;
    p.f_max = 1e9;
    p.e_max = 1.0;
    p.p_max = 0.19952623149688797;
    p.kappa = 1e-27;
    p.lambda_weight = 1.0;
    p.distance_m = 50.0;
    return p;
}

// Objective of the local-CPU subproblem, written out for the oracle.
auto local_objective(const TaskSpec& task, const DeviceProfile& prof) {
    return [=](double f) {
        return task.cpu_cycles / f + prof.lambda_weight * prof.kappa * f * f;
    };
}

// Objective of the transmit-power subproblem, written out for the oracle.
auto transmit_objective(const TaskSpec& task, double t_fixed, double h, const DeviceProfile& prof,
                        const RadioParams& radio) {
    return [=](double p) {
        const double t_comm = task.size_bits / transmission_rate(p, h, radio);
        return t_fixed + t_comm + prof.lambda_weight * p * t_comm;
    };
}

}  // namespace

TEST_CASE("transmission rate matches the closed form") {
    // p*h/sigma^2 = 1 with B = 1 MHz -> 1 Mbit/s.
    CHECK(transmission_rate(0.1, 1e-12, kRadio) == doctest::Approx(1e6).epsilon(1e-12));
    // SNR 3 -> log2(4) = 2.
    CHECK(transmission_rate(0.3, 1e-12, kRadio) == doctest::Approx(2e6).epsilon(1e-12));
    CHECK(transmission_rate(0.0, 1e-12, kRadio) == 0.0);
    CHECK_THROWS_AS(transmission_rate(-0.1, 1e-12, kRadio), std::domain_error);
    CHECK_THROWS_AS(transmission_rate(0.1, 0.0, kRadio), std::domain_error);
}

TEST_CASE("rate is strictly increasing in power and in gain") {
    double prev = transmission_rate(0.001, 1e-12, kRadio);
    for (double p = 0.002; p <= 0.2; p += 0.001) {
        const double r = transmission_rate(p, 1e-12, kRadio);
        CHECK(r > prev);
        prev = r;
    }
    prev = transmission_rate(0.1, 1e-13, kRadio);
    for (double h = 2e-13; h <= 1e-11; h += 1e-13) {
        const double r = transmission_rate(0.1, h, kRadio);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("communication delay and energy") {
    TaskSpec task{1e6, 1e8, 1.0};
    // Rate 1 Mb/s at p = 0.1 W -> 1 s upload, 0.1 J.
    const DelayEnergy de = comm_delay_energy(0.1, task, 1e-12, kRadio);
    CHECK(de.delay_s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(de.energy_j == doctest::Approx(0.1).epsilon(1e-12));

    TaskSpec doubled = task;
    doubled.size_bits *= 2.0;
    const DelayEnergy de2 = comm_delay_energy(0.1, doubled, 1e-12, kRadio);
    CHECK(de2.delay_s == doctest::Approx(2.0 * de.delay_s).epsilon(1e-12));
    CHECK(de2.energy_j == doctest::Approx(2.0 * de.energy_j).epsilon(1e-12));

    CHECK_THROWS_AS(comm_delay_energy(0.0, task, 1e-12, kRadio), std::domain_error);
}

TEST_CASE("transmit energy is strictly increasing in power") {
    TaskSpec task{1e6, 1e8, 1.0};
    double prev = 0.0;
    for (double p = 0.01; p <= 0.2; p += 0.01) {
        const double e = comm_delay_energy(p, task, 1e-11, kRadio).energy_j;
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("local delay and energy") {
    TaskSpec task{1e6, 1e8, 1.0};
    DeviceProfile prof = default_profile();
    const DelayEnergy de = local_delay_energy(1e9, task, prof);
    CHECK(de.delay_s == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(de.energy_j == doctest::Approx(1e-9).epsilon(1e-12));

    const DelayEnergy half = local_delay_energy(2e9, task, prof);
    CHECK(half.delay_s == doctest::Approx(de.delay_s / 2.0).epsilon(1e-12));
    CHECK(half.energy_j == doctest::Approx(4.0 * de.energy_j).epsilon(1e-12));

    CHECK_THROWS_AS(local_delay_energy(0.0, task, prof), std::domain_error);
}

TEST_CASE("local CPU solver: clamped, interior and infeasible cases") {
    DeviceProfile prof = default_profile();

    SUBCASE("stationary point above the cap clamps to f_max") {
        TaskSpec task{1e6, 1e8, 1.0};
        const SolverResult r = solve_local_cpu(task, prof);
        REQUIRE(r.feasible);
        CHECK(r.optimizer == doctest::Approx(1e9).epsilon(1e-12));
        CHECK(r.cost == doctest::Approx(0.1 + 1e-9).epsilon(1e-12));
        const ScalarMin oracle =
            grid_refine_oracle(local_objective(task, prof), 1e8, 1e9, 101, 6);
        CHECK(r.cost == doctest::Approx(oracle.min).epsilon(1e-9));
    }

    SUBCASE("heavy energy weight moves the optimum inside the interval") {
        TaskSpec task{1e6, 1e8, 1.0};
        prof.lambda_weight = 1e8;
        const SolverResult r = solve_local_cpu(task, prof);
        REQUIRE(r.feasible);
        // Stationary point (C / (2 lambda kappa))^(1/3).
        CHECK(r.optimizer == doctest::Approx(7.937005259840997e8).epsilon(1e-9));
        CHECK(r.cost == doctest::Approx(0.18898815748423098).epsilon(1e-9));
        const ScalarMin oracle =
            grid_refine_oracle(local_objective(task, prof), 1e8, 1e9, 101, 6);
        CHECK(r.cost == doctest::Approx(oracle.min).epsilon(1e-9));
        CHECK(r.optimizer == doctest::Approx(oracle.argmin).epsilon(1e-6));
    }

    SUBCASE("deadline beyond the CPU cap is infeasible") {
        TaskSpec task{1e6, 1e8, 0.05};  // needs f >= 2e9 > f_max
        const SolverResult r = solve_local_cpu(task, prof);
        CHECK_FALSE(r.feasible);
    }

    SUBCASE("lambda = 0 runs flat out") {
        TaskSpec task{1e6, 1e8, 1.0};
        prof.lambda_weight = 0.0;
        const SolverResult r = solve_local_cpu(task, prof);
        REQUIRE(r.feasible);
        CHECK(r.optimizer == doctest::Approx(1e9));
    }
}

TEST_CASE("transmit power solver") {
    DeviceProfile prof = default_profile();

    SUBCASE("fixed delay beyond the deadline is infeasible for any power") {
        TaskSpec task{1e5, 1e8, 0.1};
        ServerParams servers{1e9, 1e9, 0.02};  // C/F^c + psi = 0.12 > 0.1
        const SolverResult r = solve_transmit_power(task, Action::Cloud, 1e-6, prof, kRadio, servers);
        CHECK_FALSE(r.feasible);
    }

    SUBCASE("matches the grid-refinement oracle") {
        TaskSpec task{1e5, 1e8, 1.0};
        const double h = 1e-6;
        const SolverResult r = solve_transmit_power(task, Action::Edge, h, prof, kRadio, kServers);
        REQUIRE(r.feasible);
        const double t_fixed = task.cpu_cycles / kServers.f_edge;
        // Feasible interval located independently by bisection.
        const auto interval = testutil::transmit_feasible_interval(task, t_fixed, h, prof, kRadio);
        REQUIRE(interval.has_value());
        const auto obj = transmit_objective(task, t_fixed, h, prof, kRadio);
        const ScalarMin oracle = grid_refine_oracle(obj, interval->first, interval->second, 101, 6);
        CHECK(r.cost == doctest::Approx(oracle.min).epsilon(1e-6));
    }

    SUBCASE("cloud equals edge plus the access delay when capacities match") {
        TaskSpec task{1e5, 1e8, 5.0};
        ServerParams same{1e10, 1e10, 0.25};
        const double h = 1e-6;
        const SolverResult edge = solve_transmit_power(task, Action::Edge, h, prof, kRadio, same);
        const SolverResult cloud = solve_transmit_power(task, Action::Cloud, h, prof, kRadio, same);
        REQUIRE(edge.feasible);
        REQUIRE(cloud.feasible);
        CHECK(cloud.cost == doctest::Approx(edge.cost + same.psi_s).epsilon(1e-9));
    }
}

TEST_CASE("grid refinement oracle basics") {
    SUBCASE("known quadratic minimum") {
        const ScalarMin m = grid_refine_oracle([](double x) { return (x - 2.0) * (x - 2.0); },
                                               0.0, 10.0, 101, 5);
        CHECK(m.argmin == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("monotone function pins the boundary") {
        const ScalarMin m = grid_refine_oracle([](double x) { return x; }, 1.0, 3.0, 101, 3);
        CHECK(m.argmin == doctest::Approx(1.0));
        CHECK(m.min == doctest::Approx(1.0));
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(grid_refine_oracle([](double x) { return x; }, 3.0, 1.0, 101, 3),
                        std::domain_error);
        CHECK_THROWS_AS(grid_refine_oracle([](double x) { return x; }, 1.0, 3.0, 2, 3),
                        std::domain_error);
    }
}

TEST_CASE("oracle equivalence over random feasible instances") {
    Rng rng(20250810);
    int local_checked = 0;
    while (local_checked < 200) {
        TaskSpec task;
        task.size_bits = std::pow(10.0, rng.uniform(4.0, 6.5));
        task.cpu_cycles = task.size_bits * rng.uniform(50.0, 5000.0);
        task.deadline_s = rng.uniform(0.05, 3.0);
        DeviceProfile prof = default_profile();
        prof.f_max = std::pow(10.0, rng.uniform(8.5, 10.0));
        prof.e_max = std::pow(10.0, rng.uniform(-2.0, 0.5));
        prof.lambda_weight = std::pow(10.0, rng.uniform(-2.0, 9.0));
        const SolverResult r = solve_local_cpu(task, prof);
        const double f_lo = task.cpu_cycles / task.deadline_s;
        const double f_hi = std::min(prof.f_max, std::sqrt(prof.e_max / prof.kappa));
        CHECK(r.feasible == (f_lo <= f_hi));
        if (!r.feasible) continue;
        const ScalarMin oracle = grid_refine_oracle(local_objective(task, prof), f_lo, f_hi, 101, 6);
        CHECK(std::abs(r.cost - oracle.min) / oracle.min <= 1e-6);
        ++local_checked;
    }
}

TEST_CASE("local objective is convex on the feasible interval") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        TaskSpec task;
        task.size_bits = std::pow(10.0, rng.uniform(4.0, 6.5));
        task.cpu_cycles = task.size_bits * rng.uniform(50.0, 5000.0);
        task.deadline_s = rng.uniform(0.05, 3.0);
        DeviceProfile prof = default_profile();
        prof.lambda_weight = std::pow(10.0, rng.uniform(-2.0, 9.0));
        const double f_lo = task.cpu_cycles / task.deadline_s;
        const double f_hi = std::min(prof.f_max, std::sqrt(prof.e_max / prof.kappa));
        if (f_lo > f_hi) continue;
        const auto g = local_objective(task, prof);
        const double f1 = rng.uniform(f_lo, f_hi);
        const double f2 = rng.uniform(f_lo, f_hi);
        CHECK(g(0.5 * (f1 + f2)) <= 0.5 * (g(f1) + g(f2)) + 1e-12);
    }
}

TEST_CASE("transmit objective is unimodal on the feasible interval") {
    Rng rng(11);
    int checked = 0;
    while (checked < 100) {
        TaskSpec task;
        task.size_bits = std::pow(10.0, rng.uniform(4.5, 6.2));
        task.cpu_cycles = task.size_bits * rng.uniform(100.0, 3000.0);
        task.deadline_s = rng.uniform(0.3, 3.0);
        DeviceProfile prof = default_profile();
        prof.lambda_weight = rng.uniform(0.0, 5.0);
        const double h = std::pow(10.0, rng.uniform(-10.0, -5.0));
        const SolverResult r = solve_transmit_power(task, Action::Edge, h, prof, kRadio, kServers);
        if (!r.feasible) continue;
        ++checked;

        const double t_fixed = task.cpu_cycles / kServers.f_edge;
        const auto obj = transmit_objective(task, t_fixed, h, prof, kRadio);
        const auto interval = testutil::transmit_feasible_interval(task, t_fixed, h, prof, kRadio);
        REQUIRE(interval.has_value());
        const auto [lo, hi] = *interval;
        std::vector<double> y;
        const int n = 1000;
        y.reserve(n);
        for (int i = 0; i < n; ++i) y.push_back(obj(lo + (hi - lo) * i / (n - 1)));
        // Non-increasing, then non-decreasing (single local minimum).
        const double tol = 1e-12;
        int i = 0;
        while (i + 1 < n && y[i + 1] <= y[i] + tol) ++i;
        bool unimodal = true;
        for (; i + 1 < n; ++i) {
            if (y[i + 1] < y[i] - tol) {
                unimodal = false;
                break;
            }
        }
        CHECK(unimodal);
    }
}

TEST_CASE("tightening constraints never lowers the optimal cost") {
    Rng rng(13);
    int checked = 0;
    while (checked < 100) {
        TaskSpec task;
        task.size_bits = std::pow(10.0, rng.uniform(4.5, 6.2));
        task.cpu_cycles = task.size_bits * rng.uniform(100.0, 3000.0);
        task.deadline_s = rng.uniform(0.3, 3.0);
        DeviceProfile prof = default_profile();
        prof.e_max = std::pow(10.0, rng.uniform(-2.0, 0.0));
        const double h = std::pow(10.0, rng.uniform(-9.0, -5.0));

        DeviceProfile tight_e = prof;
        tight_e.e_max /= 2.0;
        TaskSpec tight_t = task;
        tight_t.deadline_s /= 2.0;

        const SolverResult base = solve_transmit_power(task, Action::Edge, h, prof, kRadio, kServers);
        const SolverResult with_e =
            solve_transmit_power(task, Action::Edge, h, tight_e, kRadio, kServers);
        const SolverResult with_t =
            solve_transmit_power(tight_t, Action::Edge, h, prof, kRadio, kServers);
        if (!base.feasible) continue;
        ++checked;
        if (with_e.feasible) CHECK(with_e.cost >= base.cost - 1e-12);
        if (with_t.feasible) CHECK(with_t.cost >= base.cost - 1e-12);

        const SolverResult lbase = solve_local_cpu(task, prof);
        const SolverResult le = solve_local_cpu(task, tight_e);
        const SolverResult lt = solve_local_cpu(tight_t, prof);
        if (lbase.feasible && le.feasible) CHECK(le.cost >= lbase.cost - 1e-12);
        if (lbase.feasible && lt.feasible) CHECK(lt.cost >= lbase.cost - 1e-12);
    }
}

TEST_CASE("golden section handles boundary minima") {
    const ScalarMin inc = golden_section_min([](double x) { return x; }, 2.0, 5.0);
    CHECK(inc.argmin == doctest::Approx(2.0));
    const ScalarMin dec = golden_section_min([](double x) { return -x; }, 2.0, 5.0);
    CHECK(dec.argmin == doctest::Approx(5.0));
    const ScalarMin point = golden_section_min([](double x) { return x * x; }, 3.0, 3.0);
    CHECK(point.argmin == 3.0);
}
