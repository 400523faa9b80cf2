#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "damrl/rl/learners.hpp"
#include "damrl/rl/mlp.hpp"

namespace testutil {

/// Fresh scratch directory under the system temp root; removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        base_ = std::filesystem::temp_directory_path() /
                ("damrl-test-" + tag + "-" + std::to_string(++counter));
        std::filesystem::remove_all(base_);
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string path(const std::string& name) const { return (base_ / name).string(); }
    std::string str() const { return base_.string(); }

  private:
    std::filesystem::path base_;
};

/// One-step bandit with reward -(a - 0.5)^2: known optimal action 0.5,
/// constant observation.
class QuadraticToyEnv final : public damrl::rl::TrainEnv {
  public:
    int feature_dim() const override { return 1; }
    int episode_length() const override { return 1; }
    std::vector<double> reset(std::uint64_t) override { return {1.0}; }
    Step step(double action_norm) override {
        const double d = action_norm - 0.5;
        return {{1.0}, -d * d, true};
    }
};

/// Central finite differences of a scalar loss over every parameter.
inline damrl::rl::MlpGrads
fd_param_grads(damrl::rl::Mlp net, std::span<const double> x,
               const std::function<double(const damrl::rl::Mlp&)>& loss, double eps = 1e-5) {
    auto grads = damrl::rl::MlpGrads::zeros_like(net);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
            const double keep = net.weights[l][i];
            net.weights[l][i] = keep + eps;
            const double hi = loss(net);
            net.weights[l][i] = keep - eps;
            const double lo = loss(net);
            net.weights[l][i] = keep;
            grads.weights[l][i] = (hi - lo) / (2.0 * eps);
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            const double keep = net.biases[l][i];
            net.biases[l][i] = keep + eps;
            const double hi = loss(net);
            net.biases[l][i] = keep - eps;
            const double lo = loss(net);
            net.biases[l][i] = keep;
            grads.biases[l][i] = (hi - lo) / (2.0 * eps);
        }
    }
    return grads;
}

/// Largest relative disagreement between two gradient sets, with an absolute
/// floor so near-zero entries compare on absolute terms.
inline double max_grad_mismatch(const damrl::rl::MlpGrads& a, const damrl::rl::MlpGrads& b,
                                double abs_floor = 1e-6) {
    double worst = 0.0;
    const auto consider = [&](double ga, double gb) {
        const double scale = std::max({std::abs(ga), std::abs(gb), abs_floor});
        worst = std::max(worst, std::abs(ga - gb) / scale);
    };
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        for (std::size_t i = 0; i < a.weights[l].size(); ++i)
            consider(a.weights[l][i], b.weights[l][i]);
        for (std::size_t i = 0; i < a.biases[l].size(); ++i)
            consider(a.biases[l][i], b.biases[l][i]);
    }
    return worst;
}

inline std::string read_file(const std::string& path) {
    std::string out;
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    std::fclose(f);
    return out;
}

} // namespace testutil
