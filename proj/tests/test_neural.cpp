#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "offsim/net.hpp"
#include "offsim/rng.hpp"

using namespace offsim;

namespace {

// Central finite differences on the batch loss, one parameter at a time.
double fd_gradient(ParamVector params, const TrainBatch& batch, std::size_t index) {
    const double w = params.values[index];
    const double h = 1e-6 * std::max(1.0, std::abs(w));
    params.values[index] = w + h;
    const double up = loss_and_gradients(params, batch).loss;
    params.values[index] = w - h;
    const double down = loss_and_gradients(params, batch).loss;
    return (up - down) / (2.0 * h);
}

TrainBatch random_batch(Rng& rng, std::size_t n) {
    TrainBatch batch;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, kStateFeatures> s;
        for (double& v : s) v = rng.normal();
        batch.states.push_back(s);
        batch.actions.push_back(rng.uniform_int(kNumActions));
        batch.targets.push_back(rng.normal());
    }
    return batch;
}

}  // namespace

TEST_CASE("layer spec validation and parameter counting") {
    CHECK(param_count(LayerSpec{{6, 4, 3}}) == 6 * 4 + 4 + 4 * 3 + 3);  // 43
    CHECK_THROWS_AS(validate(LayerSpec{{5, 4, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(LayerSpec{{6, 4, 4}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(LayerSpec{{6, 0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(LayerSpec{{6}}), std::invalid_argument);
    CHECK(make_layer_spec({30, 64, 16, 32, 32}).sizes ==
          std::vector<int>{6, 30, 64, 16, 32, 32, 3});
}

TEST_CASE("initialization is deterministic per seed") {
    const LayerSpec spec{{6, 4, 3}};
    const ParamVector a = init_network(spec, 42);
    const ParamVector b = init_network(spec, 42);
    CHECK(a.values == b.values);
    const ParamVector c = init_network(spec, 43);
    CHECK(a.values != c.values);
    CHECK(a.values.size() == 43);
}

TEST_CASE("first-layer weight variance follows the 2/fan_in scaling") {
    const LayerSpec spec{{6, 4, 3}};
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const ParamVector p = init_network(spec, 1000 + trial);
        for (int i = 0; i < 6 * 4; ++i) {
            sum += p.values[i];
            sum_sq += p.values[i] * p.values[i];
            ++n;
        }
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(var == doctest::Approx(2.0 / 6.0).epsilon(0.10));
}

TEST_CASE("forward pass basics") {
    const LayerSpec spec{{6, 4, 3}};
    ParamVector zero{spec, std::vector<double>(param_count(spec), 0.0)};

    SUBCASE("all-zero network outputs zeros") {
        const auto q = forward(zero, {1, 2, 3, 4, 5, 6});
        CHECK(q == std::array<double, 3>{0.0, 0.0, 0.0});
    }

    SUBCASE("output biases pass through a zero network") {
        ParamVector p = zero;
        // Last three entries are the output biases.
        p.values[p.values.size() - 3] = 1.0;
        p.values[p.values.size() - 2] = 2.0;
        p.values[p.values.size() - 1] = 3.0;
        const auto q = forward(p, {0.5, -0.5, 2.0, 0.0, 1.0, -1.0});
        CHECK(q == std::array<double, 3>{1.0, 2.0, 3.0});
    }

    SUBCASE("single linear layer reproduces selected inputs") {
        const LayerSpec lin{{6, 3}};
        ParamVector p{lin, std::vector<double>(param_count(lin), 0.0)};
        // Rows select inputs 0, 2 and 5.
        p.values[0 * 6 + 0] = 1.0;
        p.values[1 * 6 + 2] = 1.0;
        p.values[2 * 6 + 5] = 1.0;
        const auto q = forward(p, {7.0, 1.0, -2.5, 3.0, 9.0, 0.25});
        CHECK(q == std::array<double, 3>{7.0, -2.5, 0.25});
    }

    SUBCASE("non-finite input is rejected") {
        CHECK_THROWS_AS(forward(zero, {std::nan(""), 0, 0, 0, 0, 0}), std::domain_error);
    }

    SUBCASE("forward is pure") {
        const ParamVector p = init_network(spec, 5);
        const std::array<double, 6> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
        CHECK(forward(p, x) == forward(p, x));
    }
}

TEST_CASE("loss and gradients") {
    const LayerSpec spec{{6, 5, 3}};
    Rng rng(99);

    SUBCASE("perfect fit gives zero loss and zero gradient") {
        const ParamVector p = init_network(spec, 7);
        TrainBatch batch;
        for (int i = 0; i < 4; ++i) {
            std::array<double, 6> s;
            for (double& v : s) v = rng.normal();
            const auto q = forward(p, s);
            batch.states.push_back(s);
            batch.actions.push_back(i % 3);
            batch.targets.push_back(q[i % 3]);
        }
        const LossGrad lg = loss_and_gradients(p, batch);
        CHECK(lg.loss == 0.0);
        for (double g : lg.grad.values) CHECK(g == 0.0);
    }

    SUBCASE("loss is invariant to batch order") {
        const ParamVector p = init_network(spec, 8);
        TrainBatch batch = random_batch(rng, 6);
        TrainBatch reversed;
        for (std::size_t i = batch.states.size(); i-- > 0;) {
            reversed.states.push_back(batch.states[i]);
            reversed.actions.push_back(batch.actions[i]);
            reversed.targets.push_back(batch.targets[i]);
        }
        CHECK(loss_and_gradients(p, batch).loss ==
              doctest::Approx(loss_and_gradients(p, reversed).loss).epsilon(1e-14));
    }

    SUBCASE("empty batch is a usage error") {
        const ParamVector p = init_network(spec, 9);
        CHECK_THROWS_AS(loss_and_gradients(p, TrainBatch{}), std::invalid_argument);
    }

    SUBCASE("analytic gradient matches central finite differences") {
        for (int trial = 0; trial < 20; ++trial) {
            const LayerSpec cases[] = {LayerSpec{{6, 4, 3}}, LayerSpec{{6, 5, 4, 3}},
                                       LayerSpec{{6, 8, 3}}};
            const LayerSpec& s = cases[trial % 3];
            ParamVector p = init_network(s, 200 + trial);
            // Jitter every parameter (biases included) so no pre-activation
            // sits exactly on the rectifier kink, where the loss is not
            // differentiable and finite differences are meaningless.
            for (double& v : p.values) v += rng.uniform(-0.1, 0.1);
            const TrainBatch batch = random_batch(rng, 1 + trial % 5);
            const LossGrad lg = loss_and_gradients(p, batch);
            double worst = 0.0;
            for (std::size_t i = 0; i < p.values.size(); ++i) {
                const double fd = fd_gradient(p, batch, i);
                const double rel = std::abs(lg.grad.values[i] - fd) /
                                   std::max({1e-6, std::abs(lg.grad.values[i]), std::abs(fd)});
                worst = std::max(worst, rel);
            }
            CHECK(worst <= 1e-4);
        }
    }
}

TEST_CASE("adam updates") {
    const LayerSpec spec{{6, 4, 3}};
    const ParamVector p = init_network(spec, 21);

    SUBCASE("zero gradient leaves parameters unchanged") {
        const ParamVector zero_grad{spec, std::vector<double>(p.values.size(), 0.0)};
        const AdamState adam = make_adam_state(spec);
        const auto [next, state] = apply_update(p, zero_grad, adam);
        CHECK(next.values == p.values);
        CHECK(state.step == 1);
    }

    SUBCASE("step counter increments by one per call") {
        const ParamVector g{spec, std::vector<double>(p.values.size(), 0.1)};
        AdamState adam = make_adam_state(spec);
        ParamVector cur = p;
        for (int i = 1; i <= 5; ++i) {
            auto [next, state] = apply_update(cur, g, adam);
            cur = std::move(next);
            adam = std::move(state);
            CHECK(adam.step == i);
        }
    }

    SUBCASE("shape mismatch is rejected") {
        const ParamVector bad{LayerSpec{{6, 5, 3}},
                              std::vector<double>(param_count(LayerSpec{{6, 5, 3}}), 0.0)};
        CHECK_THROWS_AS(apply_update(p, bad, make_adam_state(spec)), std::invalid_argument);
    }

    SUBCASE("drives a scalar quadratic to zero") {
        // f(w) = w^2 on a 1-parameter view: reuse the vector machinery with a
        // single active coordinate.
        double w = 1.0;
        AdamState adam;
        adam.m.assign(1, 0.0);
        adam.v.assign(1, 0.0);
        adam.lr = 0.05;
        ParamVector param{spec, {w}};     // shape unused by apply_update math
        param.spec = LayerSpec{{6, 3}};   // placeholder; bypassed below
        for (int i = 0; i < 500; ++i) {
            ParamVector grad = param;
            grad.values[0] = 2.0 * param.values[0];
            const auto [next, state] = apply_update(param, grad, adam);
            param = next;
            adam = state;
        }
        CHECK(std::abs(param.values[0]) < 0.01);
    }
}

TEST_CASE("training on a fixed synthetic batch cuts the loss by 100x") {
    const LayerSpec spec{{6, 16, 16, 3}};
    Rng rng(31415);
    TrainBatch batch = random_batch(rng, 32);
    // Smooth deterministic targets as a learnable function of the state.
    for (std::size_t i = 0; i < batch.states.size(); ++i) {
        const auto& s = batch.states[i];
        batch.targets[i] = 0.5 * s[0] - 0.25 * s[3] + 0.1 * s[5] * s[1];
    }

    ParamVector params = init_network(spec, 2718);
    AdamState adam = make_adam_state(spec, 1e-3);
    const double initial = loss_and_gradients(params, batch).loss;
    double final_loss = initial;
    for (int step = 0; step < 2000; ++step) {
        const LossGrad lg = loss_and_gradients(params, batch);
        final_loss = lg.loss;
        auto [next, state] = apply_update(params, lg.grad, adam);
        params = std::move(next);
        adam = std::move(state);
    }
    CHECK(final_loss * 100.0 <= initial);
}

TEST_CASE("checkpoint export/import") {
    const LayerSpec spec{{6, 4, 3}};
    const ParamVector p = init_network(spec, 55);

    SUBCASE("round-trip is bit exact") {
        std::stringstream ss;
        export_params(p, ss);
        const ParamVector q = import_params(ss);
        CHECK(q.spec.sizes == p.spec.sizes);
        CHECK(q.values == p.values);
    }

    SUBCASE("exported length equals the parameter-count formula") {
        std::stringstream ss;
        export_params(p, ss);
        std::string line;
        std::getline(ss, line);  // header
        std::size_t count = 0;
        while (std::getline(ss, line)) {
            if (!line.empty()) ++count;
        }
        CHECK(count == param_count(spec));
    }

    SUBCASE("truncated payload is a format error") {
        std::stringstream ss;
        export_params(p, ss);
        std::string text = ss.str();
        text.resize(text.size() / 2);
        // Cut cleanly at a line boundary so only the length check can fire.
        text.resize(text.rfind('\n') + 1);
        std::stringstream in(text);
        CHECK_THROWS_AS(import_params(in), std::runtime_error);
    }

    SUBCASE("garbage value is a format error") {
        std::stringstream in("6 4 3\n0.5\nnot-a-number\n");
        CHECK_THROWS_AS(import_params(in), std::runtime_error);
    }

    SUBCASE("shape mismatch is rejected") {
        CHECK_THROWS_AS(require_same_shape(LayerSpec{{6, 4, 3}}, LayerSpec{{6, 5, 3}}),
                        std::runtime_error);
        CHECK_NOTHROW(require_same_shape(spec, spec));
    }
}
