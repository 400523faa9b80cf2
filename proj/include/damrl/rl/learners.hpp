#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "damrl/env/episode.hpp"
#include "damrl/policy/policy_interface.hpp"
#include "damrl/rl/features.hpp"
#include "damrl/rl/mlp.hpp"
#include "damrl/rl/replay.hpp"

namespace damrl::rl {

enum class Algorithm { DDPG, TD3, SAC };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& text);

struct LearnerConfig {
    Algorithm algorithm = Algorithm::TD3;
    double gamma = 0.999;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double tau = 0.005;
    int batch_size = 128;
    std::size_t buffer_capacity = 100000;
    double exploration_sigma = 0.1; // DDPG/TD3 action noise, normalized units
    int policy_delay = 2;           // TD3
    double target_noise_sigma = 0.2;
    double target_noise_clip = 0.5;
    double sac_alpha = 0.2; // fixed entropy weight
    double sac_log_std_min = -5.0;
    double sac_log_std_max = 2.0;
    std::vector<int> hidden_dims = {64, 64};
    bool use_adam = false;
    /// Bootstrap through time-limit termination when false (default): the
    /// max_step cutoff is not a real terminal state.
    bool timeout_terminal = false;
    /// Multiplies rewards as they enter the replay buffer so critic outputs
    /// stay near unit scale; evaluation returns are always unscaled.
    double reward_scale = 1.0;

    std::uint64_t seed = 0;
    long total_steps = 50000;
    long warmup_steps = 1000;
    long eval_interval = 5000;
    int eval_episodes = 3;

    void validate() const;
};

/// Pure one-sample target values; the learners and the tests share these.
double critic_target_ddpg(double r, bool done, double gamma, double q_next);
double critic_target_td3(double r, bool done, double gamma, double q1_next, double q2_next);
double critic_target_sac(double r, bool done, double gamma, double q1_next, double q2_next,
                         double alpha, double logp_next);

/// log pi(a|s) of the squashed Gaussian at a = tanh(u), u = mu + sigma*eps,
/// with the change-of-variables correction log(1 - tanh(u)^2) evaluated
/// stably as 2*(log 2 - u - softplus(-2u)).
double sac_log_prob(double mu, double log_std, double u);

/// Environment abstraction the learners drive: normalized scalar actions in
/// [-1, 1], flat feature vectors.
class TrainEnv {
  public:
    virtual ~TrainEnv() = default;
    virtual int feature_dim() const = 0;
    virtual int episode_length() const = 0;
    virtual std::vector<double> reset(std::uint64_t episode_seed) = 0;
    struct Step {
        std::vector<double> next_features;
        double reward = 0.0;
        bool done = false;
    };
    virtual Step step(double action_norm) = 0;
    /// Normalization constants recorded with trained policies; nullopt for
    /// abstract test environments.
    virtual std::optional<FeatureSpec> feature_spec() const { return std::nullopt; }
};

/// Adapter running the dam MDP as a TrainEnv.
class DamTrainEnv final : public TrainEnv {
  public:
    explicit DamTrainEnv(env::EpisodeConfig config);
    int feature_dim() const override { return spec_.feature_dim(); }
    int episode_length() const override { return config_.params.max_step; }
    std::vector<double> reset(std::uint64_t episode_seed) override;
    Step step(double action_norm) override;
    std::optional<FeatureSpec> feature_spec() const override { return spec_; }

  private:
    env::EpisodeConfig config_;
    FeatureSpec spec_;
    std::unique_ptr<env::Environment> env_;
};

/// Deterministic trained policy: the actor net plus the feature constants it
/// was trained with.
struct TrainedPolicy {
    Algorithm algorithm = Algorithm::TD3;
    Mlp actor;
    FeatureSpec features;

    /// Deterministic action in [-1, 1] (SAC: tanh of the mean head).
    double act_norm(std::span<const double> features_in) const;
};

std::string policy_to_json_text(const TrainedPolicy& policy);
TrainedPolicy policy_from_json_text(const std::string& text);
void write_policy_json(const TrainedPolicy& policy, const std::string& path);
TrainedPolicy load_policy_json(const std::string& path);

/// PolicyInterface adapter so trained policies evaluate exactly like the
/// baselines.
class RlPolicy final : public policy::PolicyInterface {
  public:
    explicit RlPolicy(TrainedPolicy policy, double exploration_sigma = 0.0,
                      std::uint64_t noise_seed = 0);
    env::Action act(const env::EnvState& state, bool explore) override;
    const TrainedPolicy& policy() const { return policy_; }

  private:
    TrainedPolicy policy_;
    double sigma_;
    RngStream noise_{0};
};

/// All networks and update rules for one training run. Exposed (rather than
/// buried in train()) so unit tests can drive updates directly and inspect
/// the target networks.
class Learner {
  public:
    Learner(const LearnerConfig& config, int feature_dim);

    /// Action for features: deterministic, or exploratory when explore is
    /// set (DDPG/TD3 add clipped Gaussian noise; SAC samples its policy).
    double act(std::span<const double> features, bool explore);

    /// Stores one transition, applying config().reward_scale to the reward.
    void observe(Transition t) {
        t.reward *= config_.reward_scale;
        buffer_.push(std::move(t));
    }
    bool can_update() const {
        return buffer_.size() >= static_cast<std::size_t>(config_.batch_size);
    }

    /// One gradient update on a sampled batch. Throws std::runtime_error on
    /// non-finite losses or |Q| above the divergence guard.
    void update();

    const LearnerConfig& config() const { return config_; }
    long update_count() const { return updates_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& actor_target() const { return actor_target_; }
    const Mlp& critic1() const { return critic1_; }
    const Mlp& critic2() const { return critic2_; }
    const Mlp& critic1_target() const { return critic1_target_; }
    const Mlp& critic2_target() const { return critic2_target_; }
    ReplayBuffer& buffer() { return buffer_; }

    TrainedPolicy snapshot(const FeatureSpec& spec) const;

  private:
    void update_ddpg_td3(const std::vector<const Transition*>& batch);
    void update_sac(const std::vector<const Transition*>& batch);
    double sample_action_sac(std::span<const double> features, RngStream& rng, double* logp,
                             double* u_out, double* eps_out) const;
    void optimizer_step(Mlp& net, AdamState& adam, const MlpGrads& grads, double lr);

    LearnerConfig config_;
    int feature_dim_;
    Mlp actor_, actor_target_;
    Mlp critic1_, critic1_target_;
    Mlp critic2_, critic2_target_;
    AdamState actor_adam_, critic1_adam_, critic2_adam_;
    ReplayBuffer buffer_;
    RngStream sample_rng_{0}, noise_rng_{0}, target_noise_rng_{0}, sac_rng_{0};
    long updates_ = 0;
};

struct LearningCurvePoint {
    long step = 0;
    double mean_return = 0.0;
    double std_return = 0.0;
};

struct TrainResult {
    TrainedPolicy policy;
    std::vector<LearningCurvePoint> curve;
    bool aborted = false;
    std::string abort_reason;
};

/// Full training loop: seeded warmup with uniform actions, per-step update,
/// periodic evaluation on eval_env with exploration off (same derived eval
/// seeds at every checkpoint). Divergence aborts return the partial curve
/// with `aborted` set instead of throwing.
TrainResult train(TrainEnv& train_env, TrainEnv& eval_env, const LearnerConfig& config);

std::string curve_csv(const std::vector<LearningCurvePoint>& curve);
void write_curve_csv(const std::vector<LearningCurvePoint>& curve, const std::string& path);

struct EvalStats {
    double mean_undiscounted = 0.0;
    double std_undiscounted = 0.0;
    double mean_discounted = 0.0;
    double std_discounted = 0.0;
    int episodes = 0;
};

/// Evaluation through the common policy interface: n episodes with derived
/// per-episode seeds, exploration off.
EvalStats evaluate_policy(policy::PolicyInterface& policy, const env::EpisodeConfig& config,
                          int n_episodes, std::uint64_t seed);

} // namespace damrl::rl
