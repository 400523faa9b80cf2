#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "damrl/common/rng.hpp"

namespace damrl::rl {

enum class Activation { Tanh, Relu, Linear };

/// What happens after the last layer: nothing, or tanh into [-1, 1]
/// (action-range squash).
enum class OutputSquash { None, TanhBounded };

/// Dense multi-layer perceptron. Weight matrices are row-major
/// (output x input). Plain value type; all learning state lives outside.
struct Mlp {
    std::vector<int> dims; // [input, hidden..., output]
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::vector<Activation> activations; // one per layer
    OutputSquash squash = OutputSquash::None;

    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;
};

/// Fresh net with uniform(-limit, limit) init, limit = 1/sqrt(fan_in).
Mlp make_mlp(std::vector<int> dims, std::vector<Activation> activations, OutputSquash squash,
             RngStream& init_rng);

/// Throws std::invalid_argument on input-dimension mismatch.
std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x);

/// Forward pass keeping the intermediates reverse mode needs.
struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> acts; // post-activation output per layer
    std::vector<double> output;            // after squash
};
ForwardTrace mlp_forward_traced(const Mlp& net, std::span<const double> x);

/// Parameter gradients, same shapes as the net.
struct MlpGrads {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static MlpGrads zeros_like(const Mlp& net);
    void scale(double s);
};

/// Accumulates d(loss)/d(parameters) into `grads` given d(loss)/d(output)
/// (post-squash). Optionally also yields d(loss)/d(input).
void mlp_backward(const Mlp& net, const ForwardTrace& trace, std::span<const double> d_output,
                  MlpGrads& grads, std::vector<double>* d_input = nullptr);

/// d(loss)/d(input) only — used where a net is part of a longer chain but its
/// own parameters are frozen for this term.
std::vector<double> mlp_input_gradient(const Mlp& net, const ForwardTrace& trace,
                                       std::span<const double> d_output);

/// Scalar-loss entry point: runs the closure on the traced output and
/// backpropagates its output gradient. Throws std::runtime_error on a
/// non-finite loss value.
struct LossEval {
    double value = 0.0;
    std::vector<double> d_output;
};
MlpGrads grad(const Mlp& net, std::span<const double> x,
              const std::function<LossEval(std::span<const double>)>& loss);

/// target <- tau*source + (1-tau)*target, elementwise. Throws
/// std::invalid_argument on shape mismatch or tau outside [0, 1].
void polyak_update(Mlp& target, const Mlp& source, double tau);

void sgd_step(Mlp& net, const MlpGrads& grads, double lr);

/// Adaptive-moment optimizer state (optional path behind a config flag).
struct AdamState {
    MlpGrads m;
    MlpGrads v;
    long t = 0;
    static AdamState zeros_like(const Mlp& net);
};
void adam_step(Mlp& net, AdamState& state, const MlpGrads& grads, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

std::string mlp_to_json_text(const Mlp& net);
Mlp mlp_from_json_text(const std::string& text);

} // namespace damrl::rl
