#pragma once
// Minimal fully-connected Q-network: 6 state features in, 3 action values
// out, rectifier hidden layers, linear head. Parameters live in one flat
// vector (per layer: weights then biases) so a whole network can be shipped,
// averaged and checkpointed as a unit.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "offsim/types.hpp"

namespace offsim {

inline constexpr int kStateFeatures = 6;

struct LayerSpec {
    std::vector<int> sizes;  // input width first, output width last
};

void validate(const LayerSpec& spec);  // throws std::invalid_argument
std::size_t param_count(const LayerSpec& spec);
bool same_shape(const LayerSpec& a, const LayerSpec& b);

// Builds the full layer list from hidden widths: 6 -> hidden... -> 3.
LayerSpec make_layer_spec(const std::vector<int>& hidden);

struct ParamVector {
    LayerSpec spec;
    std::vector<double> values;  // per layer: weights (out-major), then biases
};

// He-scaled random weights, zero biases; deterministic per seed.
ParamVector init_network(const LayerSpec& spec, std::uint64_t seed);

std::array<double, kNumActions> forward(const ParamVector& params,
                                        const std::array<double, kStateFeatures>& x);

struct TrainBatch {
    std::vector<std::array<double, kStateFeatures>> states;
    std::vector<int> actions;      // index of the taken action per sample
    std::vector<double> targets;   // regression target for that action
};

struct LossGrad {
    double loss = 0.0;
    ParamVector grad;
};

// Mean squared error on the taken action's Q-value; gradient by reverse-mode
// differentiation. Untaken actions receive zero gradient.
LossGrad loss_and_gradients(const ParamVector& params, const TrainBatch& batch);

struct AdamState {
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(const LayerSpec& spec, double lr = 1e-3);

// One bias-corrected Adam step; returns the updated parameters and state.
std::pair<ParamVector, AdamState> apply_update(const ParamVector& params, const ParamVector& grad,
                                               const AdamState& adam);

// Checkpoint format: one header line with the layer sizes, then one parameter
// value per line in flat order. Round-trips bit-exactly.
void export_params(const ParamVector& params, std::ostream& out);
ParamVector import_params(std::istream& in);  // throws std::runtime_error on format errors

void save_params(const ParamVector& params, const std::string& path);
ParamVector load_params(const std::string& path);

// Throws std::runtime_error when a checkpoint does not match the expected net.
void require_same_shape(const LayerSpec& expected, const LayerSpec& actual);

}  // namespace offsim
