#include "damrl/rl/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace damrl::rl {

namespace {

void check_shape(const Mlp& net) {
    if (net.dims.size() < 2) throw std::invalid_argument("mlp: need at least input and output dims");
    const std::size_t layers = net.dims.size() - 1;
    if (net.weights.size() != layers || net.biases.size() != layers ||
        net.activations.size() != layers) {
        throw std::invalid_argument("mlp: layer container sizes do not match dims");
    }
    for (std::size_t l = 0; l < layers; ++l) {
        const auto rows = static_cast<std::size_t>(net.dims[l + 1]);
        const auto cols = static_cast<std::size_t>(net.dims[l]);
        if (net.weights[l].size() != rows * cols || net.biases[l].size() != rows) {
            throw std::invalid_argument("mlp: layer " + std::to_string(l) + " has wrong shape");
        }
    }
}

double activate(Activation act, double z) {
    switch (act) {
        case Activation::Tanh: return std::tanh(z);
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Linear: return z;
    }
    throw std::logic_error("unknown activation");
}

// Derivative expressed through the post-activation value.
double activate_deriv(Activation act, double a) {
    switch (act) {
        case Activation::Tanh: return 1.0 - a * a;
        case Activation::Relu: return a > 0.0 ? 1.0 : 0.0;
        case Activation::Linear: return 1.0;
    }
    throw std::logic_error("unknown activation");
}

std::string activation_name(Activation act) {
    switch (act) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Linear: return "linear";
    }
    throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    if (name == "linear") return Activation::Linear;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

} // namespace

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Mlp make_mlp(std::vector<int> dims, std::vector<Activation> activations, OutputSquash squash,
             RngStream& init_rng) {
    if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least two dims");
    if (activations.size() != dims.size() - 1) {
        throw std::invalid_argument("make_mlp: one activation per layer required");
    }
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("make_mlp: non-positive layer width");
    }
    Mlp net;
    net.dims = std::move(dims);
    net.activations = std::move(activations);
    net.squash = squash;
    const std::size_t layers = net.dims.size() - 1;
    net.weights.resize(layers);
    net.biases.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const auto rows = static_cast<std::size_t>(net.dims[l + 1]);
        const auto cols = static_cast<std::size_t>(net.dims[l]);
        const double limit = 1.0 / std::sqrt(static_cast<double>(cols));
        net.weights[l].resize(rows * cols);
        for (auto& w : net.weights[l]) w = init_rng.uniform(-limit, limit);
        net.biases[l].assign(rows, 0.0);
    }
    return net;
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x) {
    check_shape(net);
    if (x.size() != static_cast<std::size_t>(net.input_dim())) {
        throw std::invalid_argument("mlp_forward: input dim " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(net.input_dim()));
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto rows = static_cast<std::size_t>(net.dims[l + 1]);
        const auto cols = static_cast<std::size_t>(net.dims[l]);
        next.assign(rows, 0.0);
        const double* w = net.weights[l].data();
        for (std::size_t i = 0; i < rows; ++i) {
            double z = net.biases[l][i];
            const double* wrow = w + i * cols;
            for (std::size_t j = 0; j < cols; ++j) z += wrow[j] * cur[j];
            next[i] = activate(net.activations[l], z);
        }
        cur.swap(next);
    }
    if (net.squash == OutputSquash::TanhBounded) {
        for (auto& v : cur) v = std::tanh(v);
    }
    return cur;
}

ForwardTrace mlp_forward_traced(const Mlp& net, std::span<const double> x) {
    check_shape(net);
    if (x.size() != static_cast<std::size_t>(net.input_dim())) {
        throw std::invalid_argument("mlp_forward_traced: input dim mismatch");
    }
    ForwardTrace trace;
    trace.input.assign(x.begin(), x.end());
    trace.acts.resize(net.layer_count());
    const std::vector<double>* cur = &trace.input;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto rows = static_cast<std::size_t>(net.dims[l + 1]);
        const auto cols = static_cast<std::size_t>(net.dims[l]);
        auto& out = trace.acts[l];
        out.assign(rows, 0.0);
        const double* w = net.weights[l].data();
        for (std::size_t i = 0; i < rows; ++i) {
            double z = net.biases[l][i];
            const double* wrow = w + i * cols;
            for (std::size_t j = 0; j < cols; ++j) z += wrow[j] * (*cur)[j];
            out[i] = activate(net.activations[l], z);
        }
        cur = &out;
    }
    trace.output = trace.acts.back();
    if (net.squash == OutputSquash::TanhBounded) {
        for (auto& v : trace.output) v = std::tanh(v);
    }
    return trace;
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
    MlpGrads g;
    g.weights.resize(net.weights.size());
    g.biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights[l].assign(net.weights[l].size(), 0.0);
        g.biases[l].assign(net.biases[l].size(), 0.0);
    }
    return g;
}

void MlpGrads::scale(double s) {
    for (auto& layer : weights) {
        for (auto& v : layer) v *= s;
    }
    for (auto& layer : biases) {
        for (auto& v : layer) v *= s;
    }
}

namespace {

// Shared reverse walk; `grads` may be null for input-gradient-only callers.
void backward_impl(const Mlp& net, const ForwardTrace& trace, std::span<const double> d_output,
                   MlpGrads* grads, std::vector<double>* d_input) {
    if (d_output.size() != static_cast<std::size_t>(net.output_dim())) {
        throw std::invalid_argument("mlp_backward: output gradient dim mismatch");
    }
    std::vector<double> g(d_output.begin(), d_output.end());
    if (net.squash == OutputSquash::TanhBounded) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] *= 1.0 - trace.output[i] * trace.output[i];
        }
    }
    std::vector<double> g_prev;
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        const auto rows = static_cast<std::size_t>(net.dims[l + 1]);
        const auto cols = static_cast<std::size_t>(net.dims[l]);
        const auto& a_prev = l > 0 ? trace.acts[l - 1] : trace.input;
        for (std::size_t i = 0; i < rows; ++i) {
            g[i] *= activate_deriv(net.activations[l], trace.acts[l][i]);
        }
        if (grads) {
            double* gw = (*grads).weights[l].data();
            for (std::size_t i = 0; i < rows; ++i) {
                (*grads).biases[l][i] += g[i];
                double* row = gw + i * cols;
                const double gi = g[i];
                for (std::size_t j = 0; j < cols; ++j) row[j] += gi * a_prev[j];
            }
        }
        const bool need_prev = l > 0 || d_input != nullptr;
        if (need_prev) {
            g_prev.assign(cols, 0.0);
            const double* w = net.weights[l].data();
            for (std::size_t i = 0; i < rows; ++i) {
                const double gi = g[i];
                const double* wrow = w + i * cols;
                for (std::size_t j = 0; j < cols; ++j) g_prev[j] += gi * wrow[j];
            }
            g.swap(g_prev);
        }
    }
    if (d_input) *d_input = std::move(g);
}

} // namespace

void mlp_backward(const Mlp& net, const ForwardTrace& trace, std::span<const double> d_output,
                  MlpGrads& grads, std::vector<double>* d_input) {
    backward_impl(net, trace, d_output, &grads, d_input);
}

std::vector<double> mlp_input_gradient(const Mlp& net, const ForwardTrace& trace,
                                       std::span<const double> d_output) {
    std::vector<double> d_input;
    backward_impl(net, trace, d_output, nullptr, &d_input);
    return d_input;
}

MlpGrads grad(const Mlp& net, std::span<const double> x,
              const std::function<LossEval(std::span<const double>)>& loss) {
    const ForwardTrace trace = mlp_forward_traced(net, x);
    const LossEval eval = loss(trace.output);
    if (!std::isfinite(eval.value)) {
        throw std::runtime_error("grad: non-finite loss value");
    }
    MlpGrads grads = MlpGrads::zeros_like(net);
    mlp_backward(net, trace, eval.d_output, grads);
    return grads;
}

void polyak_update(Mlp& target, const Mlp& source, double tau) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("polyak_update: tau outside [0, 1]");
    if (target.dims != source.dims) {
        throw std::invalid_argument("polyak_update: mismatched network shapes");
    }
    for (std::size_t l = 0; l < target.weights.size(); ++l) {
        for (std::size_t i = 0; i < target.weights[l].size(); ++i) {
            target.weights[l][i] = tau * source.weights[l][i] + (1.0 - tau) * target.weights[l][i];
        }
        for (std::size_t i = 0; i < target.biases[l].size(); ++i) {
            target.biases[l][i] = tau * source.biases[l][i] + (1.0 - tau) * target.biases[l][i];
        }
    }
}

void sgd_step(Mlp& net, const MlpGrads& grads, double lr) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
            net.weights[l][i] -= lr * grads.weights[l][i];
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            net.biases[l][i] -= lr * grads.biases[l][i];
        }
    }
}

AdamState AdamState::zeros_like(const Mlp& net) {
    AdamState s;
    s.m = MlpGrads::zeros_like(net);
    s.v = MlpGrads::zeros_like(net);
    return s;
}

void adam_step(Mlp& net, AdamState& state, const MlpGrads& grads, double lr, double beta1,
               double beta2, double eps) {
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                      const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], state.m.weights[l], state.v.weights[l], grads.weights[l]);
        update(net.biases[l], state.m.biases[l], state.v.biases[l], grads.biases[l]);
    }
}

std::string mlp_to_json_text(const Mlp& net) {
    nlohmann::json doc;
    doc["dims"] = net.dims;
    std::vector<std::string> acts;
    acts.reserve(net.activations.size());
    for (auto a : net.activations) acts.push_back(activation_name(a));
    doc["activations"] = acts;
    doc["squash"] = net.squash == OutputSquash::TanhBounded ? "tanh_bounded" : "none";
    doc["weights"] = net.weights;
    doc["biases"] = net.biases;
    return doc.dump(2) + "\n";
}

Mlp mlp_from_json_text(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    Mlp net;
    net.dims = doc.at("dims").get<std::vector<int>>();
    for (const auto& name : doc.at("activations").get<std::vector<std::string>>()) {
        net.activations.push_back(activation_from_name(name));
    }
    const auto squash = doc.at("squash").get<std::string>();
    if (squash == "tanh_bounded") {
        net.squash = OutputSquash::TanhBounded;
    } else if (squash == "none") {
        net.squash = OutputSquash::None;
    } else {
        throw std::invalid_argument("unknown squash '" + squash + "'");
    }
    net.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
    net.biases = doc.at("biases").get<std::vector<std::vector<double>>>();
    check_shape(net);
    return net;
}

} // namespace damrl::rl
