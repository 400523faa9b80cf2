#include "damrl/rl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace damrl::rl {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::DDPG: return "ddpg";
        case Algorithm::TD3: return "td3";
        case Algorithm::SAC: return "sac";
    }
    throw std::logic_error("unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& text) {
    if (text == "ddpg") return Algorithm::DDPG;
    if (text == "td3") return Algorithm::TD3;
    if (text == "sac") return Algorithm::SAC;
    throw std::invalid_argument("unknown algorithm '" + text + "'");
}

void LearnerConfig::validate() const {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("learner config: gamma must lie in (0, 1)");
    }
    if (!(tau > 0.0) || tau > 1.0) {
        throw std::invalid_argument("learner config: tau must lie in (0, 1]");
    }
    if (policy_delay < 1) throw std::invalid_argument("learner config: policy_delay must be >= 1");
    if (sac_alpha < 0.0) throw std::invalid_argument("learner config: sac_alpha must be >= 0");
    if (actor_lr <= 0.0 || critic_lr <= 0.0) {
        throw std::invalid_argument("learner config: step sizes must be positive");
    }
    if (batch_size < 1) throw std::invalid_argument("learner config: batch_size must be >= 1");
    if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
        throw std::invalid_argument("learner config: buffer smaller than one batch");
    }
    if (exploration_sigma < 0.0 || target_noise_sigma < 0.0 || target_noise_clip < 0.0) {
        throw std::invalid_argument("learner config: noise scales must be >= 0");
    }
    if (sac_log_std_min >= sac_log_std_max) {
        throw std::invalid_argument("learner config: bad log-std bounds");
    }
    if (hidden_dims.empty()) throw std::invalid_argument("learner config: no hidden layers");
    for (int h : hidden_dims) {
        if (h < 1) throw std::invalid_argument("learner config: non-positive hidden width");
    }
    if (total_steps < 1 || warmup_steps < 0 || eval_interval < 1 || eval_episodes < 1) {
        throw std::invalid_argument("learner config: bad loop counters");
    }
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) {
        throw std::invalid_argument("learner config: reward_scale must be positive and finite");
    }
}

double critic_target_ddpg(double r, bool done, double gamma, double q_next) {
    return r + (done ? 0.0 : gamma * q_next);
}

double critic_target_td3(double r, bool done, double gamma, double q1_next, double q2_next) {
    return r + (done ? 0.0 : gamma * std::min(q1_next, q2_next));
}

double critic_target_sac(double r, bool done, double gamma, double q1_next, double q2_next,
                         double alpha, double logp_next) {
    return r + (done ? 0.0 : gamma * (std::min(q1_next, q2_next) - alpha * logp_next));
}

namespace {

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

constexpr double kHalfLog2Pi = 0.9189385332046727; // 0.5*log(2*pi)
constexpr double kDivergenceGuard = 1e8;

} // namespace

double sac_log_prob(double mu, double log_std, double u) {
    const double sigma = std::exp(log_std);
    const double eps = (u - mu) / sigma;
    const double gaussian = -0.5 * eps * eps - log_std - kHalfLog2Pi;
    const double squash_correction = 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
    return gaussian - squash_correction;
}

DamTrainEnv::DamTrainEnv(env::EpisodeConfig config)
    : config_(std::move(config)), spec_(FeatureSpec::for_params(config_.params)) {
    config_.validate();
}

std::vector<double> DamTrainEnv::reset(std::uint64_t episode_seed) {
    config_.seed = episode_seed;
    env_ = std::make_unique<env::Environment>(config_);
    return spec_.featurize(env_->reset());
}

TrainEnv::Step DamTrainEnv::step(double action_norm) {
    if (!env_) throw std::logic_error("DamTrainEnv: step before reset");
    const env::Action action{hydro::Discharge{spec_.denormalize_action(action_norm)}};
    const env::StepOutcome out = env_->step(action);
    return {spec_.featurize(out.next_state), out.reward.total, out.done};
}

double TrainedPolicy::act_norm(std::span<const double> features_in) const {
    const auto out = mlp_forward(actor, features_in);
    if (algorithm == Algorithm::SAC) return std::tanh(out[0]);
    return std::clamp(out[0], -1.0, 1.0);
}

std::string policy_to_json_text(const TrainedPolicy& policy) {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["algorithm"] = to_string(policy.algorithm);
    doc["actor"] = nlohmann::json::parse(mlp_to_json_text(policy.actor));
    doc["features"] = nlohmann::json::parse(feature_spec_to_json_text(policy.features));
    return doc.dump(2) + "\n";
}

TrainedPolicy policy_from_json_text(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    const int version = doc.at("version").get<int>();
    if (version != 1) {
        throw std::invalid_argument("policy json: unsupported version " + std::to_string(version));
    }
    TrainedPolicy policy;
    policy.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());
    policy.actor = mlp_from_json_text(doc.at("actor").dump());
    policy.features = feature_spec_from_json_text(doc.at("features").dump());
    return policy;
}

void write_policy_json(const TrainedPolicy& policy, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write policy file: " + path);
    out << policy_to_json_text(policy);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TrainedPolicy load_policy_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open policy file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return policy_from_json_text(text);
}

RlPolicy::RlPolicy(TrainedPolicy policy, double exploration_sigma, std::uint64_t noise_seed)
    : policy_(std::move(policy)),
      sigma_(exploration_sigma),
      noise_(derive_seed(noise_seed, "rl-policy-noise")) {}

env::Action RlPolicy::act(const env::EnvState& state, bool explore) {
    const auto features = policy_.features.featurize(state);
    double a = policy_.act_norm(features);
    if (explore && sigma_ > 0.0) {
        a = std::clamp(a + sigma_ * noise_.normal(), -1.0, 1.0);
    }
    return {hydro::Discharge{policy_.features.denormalize_action(a)}};
}

Learner::Learner(const LearnerConfig& config, int feature_dim)
    : config_(config),
      feature_dim_(feature_dim),
      actor_{},
      actor_target_{},
      critic1_{},
      critic1_target_{},
      critic2_{},
      critic2_target_{},
      buffer_(config.buffer_capacity),
      sample_rng_(derive_seed(config.seed, "sample")),
      noise_rng_(derive_seed(config.seed, "noise")),
      target_noise_rng_(derive_seed(config.seed, "target-noise")),
      sac_rng_(derive_seed(config.seed, "sac")) {
    config_.validate();
    if (feature_dim < 1) throw std::invalid_argument("learner: feature_dim must be >= 1");

    std::vector<int> actor_dims{feature_dim};
    std::vector<int> critic_dims{feature_dim + 1};
    std::vector<Activation> acts;
    for (int h : config_.hidden_dims) {
        actor_dims.push_back(h);
        critic_dims.push_back(h);
        acts.push_back(Activation::Tanh);
    }
    acts.push_back(Activation::Linear);
    critic_dims.push_back(1);

    RngStream actor_init = derive_stream(config_.seed, "init.actor");
    RngStream critic1_init = derive_stream(config_.seed, "init.critic1");
    RngStream critic2_init = derive_stream(config_.seed, "init.critic2");
    if (config_.algorithm == Algorithm::SAC) {
        actor_dims.push_back(2); // [mu, raw log_std]
        actor_ = make_mlp(actor_dims, acts, OutputSquash::None, actor_init);
    } else {
        actor_dims.push_back(1);
        actor_ = make_mlp(actor_dims, acts, OutputSquash::TanhBounded, actor_init);
    }
    critic1_ = make_mlp(critic_dims, acts, OutputSquash::None, critic1_init);
    critic2_ = make_mlp(critic_dims, acts, OutputSquash::None, critic2_init);
    actor_target_ = actor_;
    critic1_target_ = critic1_;
    critic2_target_ = critic2_;
    if (config_.use_adam) {
        actor_adam_ = AdamState::zeros_like(actor_);
        critic1_adam_ = AdamState::zeros_like(critic1_);
        critic2_adam_ = AdamState::zeros_like(critic2_);
    }
}

double Learner::sample_action_sac(std::span<const double> features, RngStream& rng, double* logp,
                                  double* u_out, double* eps_out) const {
    const auto out = mlp_forward(actor_, features);
    const double mu = out[0];
    const double log_std = std::clamp(out[1], config_.sac_log_std_min, config_.sac_log_std_max);
    const double eps = rng.normal();
    const double u = mu + std::exp(log_std) * eps;
    if (logp) *logp = sac_log_prob(mu, log_std, u);
    if (u_out) *u_out = u;
    if (eps_out) *eps_out = eps;
    return std::tanh(u);
}

double Learner::act(std::span<const double> features, bool explore) {
    if (config_.algorithm == Algorithm::SAC) {
        if (explore) return sample_action_sac(features, noise_rng_, nullptr, nullptr, nullptr);
        return std::tanh(mlp_forward(actor_, features)[0]);
    }
    double a = mlp_forward(actor_, features)[0];
    if (explore && config_.exploration_sigma > 0.0) {
        a += config_.exploration_sigma * noise_rng_.normal();
    }
    return std::clamp(a, -1.0, 1.0);
}

void Learner::optimizer_step(Mlp& net, AdamState& adam, const MlpGrads& grads, double lr) {
    if (config_.use_adam) {
        adam_step(net, adam, grads, lr);
    } else {
        sgd_step(net, grads, lr);
    }
}

void Learner::update() {
    if (!can_update()) throw std::logic_error("learner: not enough transitions to update");
    ++updates_;
    const auto batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size), sample_rng_);
    if (config_.algorithm == Algorithm::SAC) {
        update_sac(batch);
    } else {
        update_ddpg_td3(batch);
    }
}

namespace {

std::vector<double> concat_state_action(const std::vector<double>& state, double action) {
    std::vector<double> sa;
    sa.reserve(state.size() + 1);
    sa.insert(sa.end(), state.begin(), state.end());
    sa.push_back(action);
    return sa;
}

void check_q(double q) {
    if (!std::isfinite(q) || std::abs(q) > kDivergenceGuard) {
        throw std::runtime_error("divergence guard tripped: |Q| = " + std::to_string(q));
    }
}

} // namespace

void Learner::update_ddpg_td3(const std::vector<const Transition*>& batch) {
    const bool td3 = config_.algorithm == Algorithm::TD3;
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    MlpGrads c1_grads = MlpGrads::zeros_like(critic1_);
    MlpGrads c2_grads = td3 ? MlpGrads::zeros_like(critic2_) : MlpGrads{};
    double critic_loss = 0.0;
    for (const Transition* t : batch) {
        double a_next = mlp_forward(actor_target_, t->next_state)[0];
        if (td3) {
            const double noise =
                std::clamp(config_.target_noise_sigma * target_noise_rng_.normal(),
                           -config_.target_noise_clip, config_.target_noise_clip);
            a_next = std::clamp(a_next + noise, -1.0, 1.0);
        }
        const auto sa_next = concat_state_action(t->next_state, a_next);
        const double q1_next = mlp_forward(critic1_target_, sa_next)[0];
        double y;
        const bool done = t->done && config_.timeout_terminal;
        if (td3) {
            const double q2_next = mlp_forward(critic2_target_, sa_next)[0];
            y = critic_target_td3(t->reward, done, config_.gamma, q1_next, q2_next);
        } else {
            y = critic_target_ddpg(t->reward, done, config_.gamma, q1_next);
        }
        check_q(y);

        const auto sa = concat_state_action(t->state, t->action);
        const ForwardTrace tr1 = mlp_forward_traced(critic1_, sa);
        const double q1 = tr1.output[0];
        check_q(q1);
        const double e1 = q1 - y;
        critic_loss += e1 * e1 * inv_b;
        const double d1 = 2.0 * e1 * inv_b;
        mlp_backward(critic1_, tr1, std::span<const double>(&d1, 1), c1_grads);
        if (td3) {
            const ForwardTrace tr2 = mlp_forward_traced(critic2_, sa);
            const double q2 = tr2.output[0];
            check_q(q2);
            const double e2 = q2 - y;
            critic_loss += e2 * e2 * inv_b;
            const double d2 = 2.0 * e2 * inv_b;
            mlp_backward(critic2_, tr2, std::span<const double>(&d2, 1), c2_grads);
        }
    }
    if (!std::isfinite(critic_loss)) throw std::runtime_error("critic loss is not finite");
    optimizer_step(critic1_, critic1_adam_, c1_grads, config_.critic_lr);
    if (td3) optimizer_step(critic2_, critic2_adam_, c2_grads, config_.critic_lr);

    const bool actor_turn = !td3 || (updates_ % config_.policy_delay == 0);
    if (!actor_turn) return;

    MlpGrads a_grads = MlpGrads::zeros_like(actor_);
    double actor_loss = 0.0;
    for (const Transition* t : batch) {
        const ForwardTrace atr = mlp_forward_traced(actor_, t->state);
        const double a = atr.output[0];
        const ForwardTrace ctr = mlp_forward_traced(critic1_, concat_state_action(t->state, a));
        actor_loss -= ctr.output[0] * inv_b;
        const double d_loss_d_q = -inv_b;
        const auto d_input =
            mlp_input_gradient(critic1_, ctr, std::span<const double>(&d_loss_d_q, 1));
        const double d_loss_d_a = d_input[static_cast<std::size_t>(feature_dim_)];
        mlp_backward(actor_, atr, std::span<const double>(&d_loss_d_a, 1), a_grads);
    }
    if (!std::isfinite(actor_loss)) throw std::runtime_error("actor loss is not finite");
    optimizer_step(actor_, actor_adam_, a_grads, config_.actor_lr);

    polyak_update(actor_target_, actor_, config_.tau);
    polyak_update(critic1_target_, critic1_, config_.tau);
    if (td3) polyak_update(critic2_target_, critic2_, config_.tau);
}

void Learner::update_sac(const std::vector<const Transition*>& batch) {
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const double alpha = config_.sac_alpha;

    MlpGrads c1_grads = MlpGrads::zeros_like(critic1_);
    MlpGrads c2_grads = MlpGrads::zeros_like(critic2_);
    double critic_loss = 0.0;
    for (const Transition* t : batch) {
        double logp_next = 0.0;
        const double a_next = sample_action_sac(t->next_state, sac_rng_, &logp_next, nullptr, nullptr);
        const auto sa_next = concat_state_action(t->next_state, a_next);
        const double q1_next = mlp_forward(critic1_target_, sa_next)[0];
        const double q2_next = mlp_forward(critic2_target_, sa_next)[0];
        const bool done = t->done && config_.timeout_terminal;
        const double y = critic_target_sac(t->reward, done, config_.gamma, q1_next, q2_next, alpha,
                                           logp_next);
        check_q(y);

        const auto sa = concat_state_action(t->state, t->action);
        for (int c = 0; c < 2; ++c) {
            Mlp& critic = c == 0 ? critic1_ : critic2_;
            MlpGrads& grads = c == 0 ? c1_grads : c2_grads;
            const ForwardTrace tr = mlp_forward_traced(critic, sa);
            check_q(tr.output[0]);
            const double e = tr.output[0] - y;
            critic_loss += e * e * inv_b;
            const double d = 2.0 * e * inv_b;
            mlp_backward(critic, tr, std::span<const double>(&d, 1), grads);
        }
    }
    if (!std::isfinite(critic_loss)) throw std::runtime_error("critic loss is not finite");
    optimizer_step(critic1_, critic1_adam_, c1_grads, config_.critic_lr);
    optimizer_step(critic2_, critic2_adam_, c2_grads, config_.critic_lr);

    MlpGrads a_grads = MlpGrads::zeros_like(actor_);
    double actor_loss = 0.0;
    for (const Transition* t : batch) {
        const ForwardTrace atr = mlp_forward_traced(actor_, t->state);
        const double mu = atr.output[0];
        const double raw_log_std = atr.output[1];
        const bool clamped = raw_log_std < config_.sac_log_std_min ||
                             raw_log_std > config_.sac_log_std_max;
        const double log_std =
            std::clamp(raw_log_std, config_.sac_log_std_min, config_.sac_log_std_max);
        const double sigma = std::exp(log_std);
        const double eps = sac_rng_.normal();
        const double u = mu + sigma * eps;
        const double a = std::tanh(u);
        const double logp = sac_log_prob(mu, log_std, u);

        const auto sa = concat_state_action(t->state, a);
        const ForwardTrace tr1 = mlp_forward_traced(critic1_, sa);
        const ForwardTrace tr2 = mlp_forward_traced(critic2_, sa);
        const double q1 = tr1.output[0];
        const double q2 = tr2.output[0];
        check_q(q1);
        check_q(q2);
        const double q_min = std::min(q1, q2);
        actor_loss += (alpha * logp - q_min) * inv_b;

        const double one = 1.0;
        const auto d_input = q1 <= q2
                                 ? mlp_input_gradient(critic1_, tr1, std::span<const double>(&one, 1))
                                 : mlp_input_gradient(critic2_, tr2, std::span<const double>(&one, 1));
        const double dq_da = d_input[static_cast<std::size_t>(feature_dim_)];
        const double da_du = 1.0 - a * a;

        // d(alpha*logp - Qmin)/d mu and /d log_std under the reparameterized
        // sample u = mu + sigma*eps with eps held fixed:
        //   d logp/d u = 2*tanh(u) (Gaussian term is eps-only), du/dmu = 1,
        //   du/dlog_std = sigma*eps, and d logp/d log_std has the extra -1.
        const double g_mu = inv_b * (alpha * 2.0 * a - dq_da * da_du);
        const double g_log_std =
            clamped ? 0.0
                    : inv_b * (alpha * (-1.0 + 2.0 * a * eps * sigma) - dq_da * da_du * eps * sigma);
        const double d_out[2] = {g_mu, g_log_std};
        mlp_backward(actor_, atr, std::span<const double>(d_out, 2), a_grads);
    }
    if (!std::isfinite(actor_loss)) throw std::runtime_error("actor loss is not finite");
    optimizer_step(actor_, actor_adam_, a_grads, config_.actor_lr);

    polyak_update(critic1_target_, critic1_, config_.tau);
    polyak_update(critic2_target_, critic2_, config_.tau);
}

TrainedPolicy Learner::snapshot(const FeatureSpec& spec) const {
    TrainedPolicy policy;
    policy.algorithm = config_.algorithm;
    policy.actor = actor_;
    policy.features = spec;
    return policy;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

LearningCurvePoint evaluate_learner(Learner& learner, TrainEnv& eval_env,
                                    const LearnerConfig& config, long step) {
    std::vector<double> returns;
    returns.reserve(static_cast<std::size_t>(config.eval_episodes));
    for (int e = 0; e < config.eval_episodes; ++e) {
        auto state = eval_env.reset(derive_seed(config.seed, "eval." + std::to_string(e)));
        double total = 0.0;
        for (int t = 0; t < eval_env.episode_length(); ++t) {
            const auto out = eval_env.step(learner.act(state, false));
            total += out.reward;
            if (out.done) break;
            state = out.next_features;
        }
        returns.push_back(total);
    }
    const MeanStd ms = mean_std(returns);
    return {step, ms.mean, ms.std};
}

} // namespace

TrainResult train(TrainEnv& train_env, TrainEnv& eval_env, const LearnerConfig& config) {
    config.validate();
    if (train_env.feature_dim() != eval_env.feature_dim()) {
        throw std::invalid_argument("train: train and eval environments disagree on features");
    }
    Learner learner(config, train_env.feature_dim());
    RngStream warmup_rng = derive_stream(config.seed, "warmup");

    TrainResult result;
    result.curve.push_back(evaluate_learner(learner, eval_env, config, 0));

    long episode_index = 0;
    auto episode_seed = [&](long index) {
        return derive_seed(config.seed, "episode." + std::to_string(index));
    };
    std::vector<double> state = train_env.reset(episode_seed(episode_index));
    try {
        for (long step = 1; step <= config.total_steps; ++step) {
            const double action = step <= config.warmup_steps ? warmup_rng.uniform(-1.0, 1.0)
                                                              : learner.act(state, true);
            TrainEnv::Step out = train_env.step(action);
            learner.observe(
                {state, action, out.reward, out.next_features, out.done});
            if (out.done) {
                ++episode_index;
                state = train_env.reset(episode_seed(episode_index));
            } else {
                state = std::move(out.next_features);
            }
            if (step > config.warmup_steps && learner.can_update()) learner.update();
            if (step % config.eval_interval == 0 || step == config.total_steps) {
                if (result.curve.empty() || result.curve.back().step != step) {
                    result.curve.push_back(evaluate_learner(learner, eval_env, config, step));
                }
            }
        }
    } catch (const std::runtime_error& e) {
        result.aborted = true;
        result.abort_reason = e.what();
    }
    FeatureSpec spec = train_env.feature_spec().value_or(FeatureSpec{});
    result.policy = learner.snapshot(spec);
    return result;
}

std::string curve_csv(const std::vector<LearningCurvePoint>& curve) {
    std::string out = "step,mean_return,std_return\n";
    char buf[128];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof buf, "%ld,%.9g,%.9g\n", p.step, p.mean_return, p.std_return);
        out += buf;
    }
    return out;
}

void write_curve_csv(const std::vector<LearningCurvePoint>& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write curve file: " + path);
    out << curve_csv(curve);
    if (!out) throw std::runtime_error("write failed: " + path);
}

EvalStats evaluate_policy(policy::PolicyInterface& policy, const env::EpisodeConfig& config,
                          int n_episodes, std::uint64_t seed) {
    if (n_episodes < 1) throw std::invalid_argument("evaluate_policy: n_episodes must be >= 1");
    std::vector<double> undiscounted, discounted;
    undiscounted.reserve(static_cast<std::size_t>(n_episodes));
    discounted.reserve(static_cast<std::size_t>(n_episodes));
    for (int e = 0; e < n_episodes; ++e) {
        env::EpisodeConfig episode = config;
        episode.seed = derive_seed(seed, "episode." + std::to_string(e));
        const env::EpisodeTrace trace = env::run_episode(policy, episode, false);
        undiscounted.push_back(trace.undiscounted_return);
        discounted.push_back(trace.discounted_return);
    }
    const MeanStd u = mean_std(undiscounted);
    const MeanStd d = mean_std(discounted);
    return {u.mean, u.std, d.mean, d.std, n_episodes};
}

} // namespace damrl::rl
