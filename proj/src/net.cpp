#include "offsim/net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "offsim/rng.hpp"

namespace offsim {

void validate(const LayerSpec& spec) {
    if (spec.sizes.size() < 2) throw std::invalid_argument("layer spec needs input and output widths");
    if (spec.sizes.front() != kStateFeatures) {
        throw std::invalid_argument("layer spec input width must be 6");
    }
    if (spec.sizes.back() != kNumActions) {
        throw std::invalid_argument("layer spec output width must be 3");
    }
    for (int w : spec.sizes) {
        if (w < 1) throw std::invalid_argument("layer widths must be >= 1");
    }
}

std::size_t param_count(const LayerSpec& spec) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < spec.sizes.size(); ++l) {
        n += static_cast<std::size_t>(spec.sizes[l]) * spec.sizes[l + 1] + spec.sizes[l + 1];
    }
    return n;
}

bool same_shape(const LayerSpec& a, const LayerSpec& b) { return a.sizes == b.sizes; }

LayerSpec make_layer_spec(const std::vector<int>& hidden) {
    LayerSpec spec;
    spec.sizes.reserve(hidden.size() + 2);
    spec.sizes.push_back(kStateFeatures);
    spec.sizes.insert(spec.sizes.end(), hidden.begin(), hidden.end());
    spec.sizes.push_back(kNumActions);
    validate(spec);
    return spec;
}

ParamVector init_network(const LayerSpec& spec, std::uint64_t seed) {
    validate(spec);
    ParamVector params{spec, std::vector<double>(param_count(spec), 0.0)};
    Rng rng(seed);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < spec.sizes.size(); ++l) {
        const int n_in = spec.sizes[l];
        const int n_out = spec.sizes[l + 1];
        const double scale = std::sqrt(2.0 / n_in);
        for (int i = 0; i < n_in * n_out; ++i) params.values[off + i] = scale * rng.normal();
        off += static_cast<std::size_t>(n_in) * n_out + n_out;  // biases stay zero
    }
    return params;
}

namespace {

void check_finite(const std::array<double, kStateFeatures>& x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw std::domain_error("network input must be finite");
    }
}

// Runs the network, keeping per-layer pre-activations when `zs` is non-null
// (needed for the backward pass).
std::vector<double> run_forward(const ParamVector& params,
                                const std::array<double, kStateFeatures>& x,
                                std::vector<std::vector<double>>* zs,
                                std::vector<std::vector<double>>* activations) {
    const auto& sizes = params.spec.sizes;
    std::vector<double> act(x.begin(), x.end());
    if (activations) activations->push_back(act);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int n_in = sizes[l];
        const int n_out = sizes[l + 1];
        const double* w = params.values.data() + off;
        const double* b = w + static_cast<std::size_t>(n_in) * n_out;
        std::vector<double> z(n_out);
        for (int o = 0; o < n_out; ++o) {
            double s = b[o];
            const double* row = w + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) s += row[i] * act[i];
            z[o] = s;
        }
        if (zs) zs->push_back(z);
        const bool last = l + 2 == sizes.size();
        if (!last) {
            for (double& v : z) v = v > 0.0 ? v : 0.0;  // rectifier
        }
        act = std::move(z);
        if (activations) activations->push_back(act);
        off += static_cast<std::size_t>(n_in) * n_out + n_out;
    }
    return act;
}

}  // namespace

std::array<double, kNumActions> forward(const ParamVector& params,
                                        const std::array<double, kStateFeatures>& x) {
    validate(params.spec);
    check_finite(x);
    const std::vector<double> out = run_forward(params, x, nullptr, nullptr);
    return {out[0], out[1], out[2]};
}

LossGrad loss_and_gradients(const ParamVector& params, const TrainBatch& batch) {
    validate(params.spec);
    const std::size_t n = batch.states.size();
    if (n == 0) throw std::invalid_argument("empty training batch");
    if (batch.actions.size() != n || batch.targets.size() != n) {
        throw std::invalid_argument("batch arrays must have equal length");
    }

    const auto& sizes = params.spec.sizes;
    LossGrad result;
    result.grad = ParamVector{params.spec, std::vector<double>(params.values.size(), 0.0)};

    for (std::size_t s = 0; s < n; ++s) {
        check_finite(batch.states[s]);
        const int a = batch.actions[s];
        if (a < 0 || a >= kNumActions) throw std::invalid_argument("action index out of range");
        if (!std::isfinite(batch.targets[s])) throw std::invalid_argument("target must be finite");

        std::vector<std::vector<double>> zs;
        std::vector<std::vector<double>> acts;
        const std::vector<double> out = run_forward(params, batch.states[s], &zs, &acts);

        const double err = out[a] - batch.targets[s];
        result.loss += err * err / n;

        // Backward pass; only the taken action feeds the output delta.
        std::vector<double> delta(sizes.back(), 0.0);
        delta[a] = 2.0 * err / n;
        std::size_t off = params.values.size();
        for (std::size_t l = sizes.size() - 1; l-- > 0;) {
            const int n_in = sizes[l];
            const int n_out = sizes[l + 1];
            off -= static_cast<std::size_t>(n_in) * n_out + n_out;
            double* gw = result.grad.values.data() + off;
            double* gb = gw + static_cast<std::size_t>(n_in) * n_out;
            const double* w = params.values.data() + off;
            const std::vector<double>& a_in = acts[l];
            for (int o = 0; o < n_out; ++o) {
                const double d = delta[o];
                if (d != 0.0) {
                    double* grow = gw + static_cast<std::size_t>(o) * n_in;
                    for (int i = 0; i < n_in; ++i) grow[i] += d * a_in[i];
                    gb[o] += d;
                }
            }
            if (l == 0) break;
            std::vector<double> prev(n_in, 0.0);
            for (int i = 0; i < n_in; ++i) {
                if (zs[l - 1][i] <= 0.0) continue;  // rectifier gate
                double s_acc = 0.0;
                for (int o = 0; o < n_out; ++o) {
                    s_acc += w[static_cast<std::size_t>(o) * n_in + i] * delta[o];
                }
                prev[i] = s_acc;
            }
            delta = std::move(prev);
        }
    }
    return result;
}

AdamState make_adam_state(const LayerSpec& spec, double lr) {
    validate(spec);
    AdamState state;
    state.m.assign(param_count(spec), 0.0);
    state.v.assign(param_count(spec), 0.0);
    state.lr = lr;
    return state;
}

std::pair<ParamVector, AdamState> apply_update(const ParamVector& params, const ParamVector& grad,
                                               const AdamState& adam) {
    if (!same_shape(params.spec, grad.spec) || params.values.size() != grad.values.size() ||
        params.values.size() != adam.m.size()) {
        throw std::invalid_argument("parameter, gradient and optimizer shapes must match");
    }
    ParamVector next = params;
    AdamState state = adam;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, state.step);
    const double bc2 = 1.0 - std::pow(state.beta2, state.step);
    for (std::size_t i = 0; i < next.values.size(); ++i) {
        const double g = grad.values[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        next.values[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
    return {std::move(next), std::move(state)};
}

void export_params(const ParamVector& params, std::ostream& out) {
    validate(params.spec);
    for (std::size_t i = 0; i < params.spec.sizes.size(); ++i) {
        if (i) out << ' ';
        out << params.spec.sizes[i];
    }
    out << '\n';
    char buf[32];
    for (double v : params.values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << '\n';
    }
}

ParamVector import_params(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("checkpoint: missing header line");
    LayerSpec spec;
    {
        std::istringstream hs(header);
        int w;
        while (hs >> w) spec.sizes.push_back(w);
        if (!hs.eof()) throw std::runtime_error("checkpoint: malformed header line");
    }
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("checkpoint: bad layer sizes: ") + e.what());
    }

    const std::size_t expected = param_count(spec);
    ParamVector params{spec, {}};
    params.values.reserve(expected);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(line, &pos);
        } catch (const std::exception&) {
            throw std::runtime_error("checkpoint: unparseable value '" + line + "'");
        }
        if (pos != line.size()) throw std::runtime_error("checkpoint: trailing junk in '" + line + "'");
        if (!std::isfinite(v)) throw std::runtime_error("checkpoint: non-finite value");
        if (params.values.size() == expected) throw std::runtime_error("checkpoint: too many values");
        params.values.push_back(v);
    }
    if (params.values.size() != expected) {
        throw std::runtime_error("checkpoint: expected " + std::to_string(expected) + " values, got " +
                                 std::to_string(params.values.size()));
    }
    return params;
}

void save_params(const ParamVector& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    export_params(params, out);
    if (!out) throw std::runtime_error("write failure on checkpoint: " + path);
}

ParamVector load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    return import_params(in);
}

void require_same_shape(const LayerSpec& expected, const LayerSpec& actual) {
    if (!same_shape(expected, actual)) {
        throw std::runtime_error("checkpoint shape does not match the configured network");
    }
}

}  // namespace offsim
