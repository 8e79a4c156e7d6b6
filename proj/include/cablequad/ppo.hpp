// Copyright 2026 The cablequad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CABLEQUAD_PPO_HPP_
#define CABLEQUAD_PPO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cablequad/checkpoint.hpp"
#include "cablequad/network.hpp"

namespace cablequad {

struct PPOConfig {
    double gamma{0.99};
    double lam{0.95};
    double clip_eps{0.2};
    int epochs{10};
    int minibatches{4};
    double lr{3e-4};
    double entropy_coeff{1e-3};
    double value_coeff{0.5};
    double grad_clip{0.5};
    int steps_per_iter{512};  // per environment
    int num_envs{8};
    double reward_scale{1.0};  // training-side scaling; logs stay raw
    bool anneal_lr{false};     // linear decay of lr over the run

    int batch_size() const { return steps_per_iter * num_envs; }
};

// Flat on-policy batch. Environments are stored back to back in env-index
// order; `env_start` has num_envs+1 segment offsets. `bootstrap_value` is
// V(s_T) per environment for the truncated tail of each segment.
struct RolloutBatch {
    MatrixXd obs;          // obs_dim x N
    MatrixXd pre_squash;   // action_dim x N
    MatrixXd actions;      // action_dim x N, squashed
    VectorXd log_prob;     // N
    VectorXd reward;       // N (raw, unscaled)
    VectorXd value;        // N
    std::vector<std::uint8_t> done;  // N
    VectorXd end_value;    // N: bootstrap at episode ends; 0 on failure,
                           // V(terminal obs) on time-limit truncation
    std::vector<int> env_start;      // num_envs + 1
    VectorXd bootstrap_value;        // num_envs

    struct EpisodeMeta {
        double episode_return{0.0};
        int length{0};
        std::string termination;  // "timeout" or a failure reason
        std::uint64_t episode_seed{0};
    };
    std::vector<EpisodeMeta> episodes;

    long size() const { return log_prob.size(); }
};

// Generalized advantage estimation per environment segment. Done flags cut
// the recursion so episodes never mix. At an episode end the TD target
// bootstraps from `end_value`: zero after a failure, the terminal
// observation's value after a time-limit truncation. The segment tail
// bootstraps from `bootstrap_value`.
inline std::pair<VectorXd, VectorXd> gae_advantages(const RolloutBatch& b,
                                                    const PPOConfig& cfg) {
    const long n = b.size();
    VectorXd adv = VectorXd::Zero(n);
    const int num_envs = static_cast<int>(b.env_start.size()) - 1;
    const bool has_end = b.end_value.size() == n;
    for (int e = 0; e < num_envs; ++e) {
        double last_gae = 0.0;
        int lo = b.env_start[e], hi = b.env_start[e + 1];
        for (int t = hi - 1; t >= lo; --t) {
            double not_done = b.done[t] ? 0.0 : 1.0;
            double next_value;
            if (b.done[t])
                next_value = has_end ? b.end_value(t) : 0.0;
            else
                next_value = t + 1 < hi ? b.value(t + 1) : b.bootstrap_value(e);
            double reward = cfg.reward_scale * b.reward(t);
            double delta = reward + cfg.gamma * next_value - b.value(t);
            last_gae = delta + cfg.gamma * cfg.lam * not_done * last_gae;
            adv(t) = last_gae;
        }
    }
    VectorXd ret = adv + b.value;
    return {adv, ret};
}

// Per-sample clipped surrogate: loss contribution and its derivative with
// respect to the new log-probability. Gradient flows through the unclipped
// branch, or through the clipped branch only while the ratio is inside the
// clip interval.
inline std::pair<double, double> clipped_surrogate(double ratio,
                                                   double advantage,
                                                   double clip_eps) {
    double unclipped = ratio * advantage;
    double clipped =
        std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
    if (unclipped <= clipped) return {-unclipped, -unclipped};
    bool inside = ratio > 1.0 - clip_eps && ratio < 1.0 + clip_eps;
    return {-clipped, inside ? -unclipped : 0.0};
}

// Whole-batch advantage normalization to zero mean and unit deviation.
inline std::pair<VectorXd, VectorXd> normalized_advantages(
    const RolloutBatch& b, const PPOConfig& cfg) {
    auto [adv, ret] = gae_advantages(b, cfg);
    const double n = static_cast<double>(adv.size());
    double mean = adv.mean();
    double var = (adv.array() - mean).square().sum() / n;
    VectorXd adv_n = (adv.array() - mean) / (std::sqrt(var) + 1e-8);
    return {adv_n, ret};
}

struct AdamState {
    VectorXd m, v;
    long t{0};

    explicit AdamState(long n) : m(VectorXd::Zero(n)), v(VectorXd::Zero(n)) {}
};

inline void adam_step(VectorXd& params, const VectorXd& grad, AdamState& st,
                      double lr, double beta1 = 0.9, double beta2 = 0.999,
                      double eps = 1e-8) {
    st.t += 1;
    st.m = beta1 * st.m + (1.0 - beta1) * grad;
    st.v = beta2 * st.v + (1.0 - beta2) * grad.cwiseProduct(grad);
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
    params.array() -= lr * (st.m.array() / bc1) /
                      ((st.v.array() / bc2).sqrt() + eps);
}

struct UpdateStats {
    double actor_loss{0.0};
    double value_loss{0.0};
    double entropy{0.0};
    double approx_kl{0.0};
    bool aborted{false};
};

// Clipped-surrogate PPO update with minibatched epochs, whole-batch
// advantage normalization, gradient-norm clipping and Adam. A non-finite
// loss restores the entry parameters and reports an aborted update.
inline UpdateStats ppo_update(PolicyParams& params, const RolloutBatch& batch,
                              const PPOConfig& cfg, AdamState& adam,
                              RngStream& rng) {
    const long n = batch.size();
    auto [adv_n, ret] = normalized_advantages(batch, cfg);

    VectorXd params_backup = params.flat();

    std::vector<long> idx(n);
    for (long i = 0; i < n; ++i) idx[i] = i;

    const long mb_size = n / cfg.minibatches;
    UpdateStats stats;
    long updates = 0;

    VectorXd grad(params.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the deterministic stream
        for (long i = n - 1; i > 0; --i) {
            long j = static_cast<long>(rng.uniform_index(
                static_cast<std::uint64_t>(i + 1)));
            std::swap(idx[i], idx[j]);
        }
        for (int mb = 0; mb < cfg.minibatches; ++mb) {
            long lo = mb * mb_size;
            long count = mb == cfg.minibatches - 1 ? n - lo : mb_size;
            if (count <= 0) continue;

            MatrixXd obs(batch.obs.rows(), count);
            MatrixXd u(batch.pre_squash.rows(), count);
            VectorXd logp_old(count), a_hat(count), returns(count);
            for (long k = 0; k < count; ++k) {
                long src = idx[lo + k];
                obs.col(k) = batch.obs.col(src);
                u.col(k) = batch.pre_squash.col(src);
                logp_old(k) = batch.log_prob(src);
                a_hat(k) = adv_n(src);
                returns(k) = ret(src);
            }

            nn::ForwardCache cache;
            nn::forward(params, obs, cache);
            VectorXd logp_new =
                nn::squashed_log_prob(u, cache.mean_raw, cache.log_std);
            double entropy = nn::gaussian_entropy(cache.log_std);

            VectorXd log_ratio = logp_new - logp_old;
            VectorXd ratio = log_ratio.array().exp();

            double pg_loss = 0.0, kl = 0.0;
            VectorXd dlogp = VectorXd::Zero(count);
            for (long k = 0; k < count; ++k) {
                auto [loss_k, dlogp_k] =
                    clipped_surrogate(ratio(k), a_hat(k), cfg.clip_eps);
                pg_loss += loss_k;
                dlogp(k) = dlogp_k;
                kl += (ratio(k) - 1.0) - log_ratio(k);
            }
            double inv_n = 1.0 / static_cast<double>(count);
            pg_loss *= inv_n;
            kl *= inv_n;

            VectorXd vdiff = cache.value - returns;
            double v_loss = 0.5 * vdiff.squaredNorm() * inv_n;

            double loss =
                pg_loss + cfg.value_coeff * v_loss - cfg.entropy_coeff * entropy;
            if (!std::isfinite(loss)) {
                params.flat() = params_backup;
                stats.aborted = true;
                return stats;
            }

            // Backward. d pg / d mu = dlogp * dlogp_dmu; the tanh correction
            // term does not depend on parameters for stored u.
            MatrixXd dmu(u.rows(), count);
            VectorXd dlog_std = VectorXd::Zero(u.rows());
            for (long i = 0; i < u.rows(); ++i) {
                double sd = std::exp(cache.log_std(i));
                for (long k = 0; k < count; ++k) {
                    double z = (u(i, k) - cache.mean_raw(i, k)) / sd;
                    dmu(i, k) = dlogp(k) * inv_n * (z / sd);
                    dlog_std(i) += dlogp(k) * inv_n * (z * z - 1.0);
                }
                dlog_std(i) -= cfg.entropy_coeff;  // d entropy / d log_std = 1
            }
            VectorXd dvalue = cfg.value_coeff * vdiff * inv_n;

            grad.setZero();
            nn::backward(params, cache, dmu, dlog_std, dvalue, grad);

            double gnorm = grad.norm();
            if (gnorm > cfg.grad_clip && gnorm > 0.0)
                grad *= cfg.grad_clip / gnorm;
            adam_step(params.flat(), grad, adam, cfg.lr);

            stats.actor_loss += pg_loss;
            stats.value_loss += v_loss;
            stats.entropy = entropy;
            stats.approx_kl += kl;
            ++updates;
        }
    }
    if (updates > 0) {
        stats.actor_loss /= static_cast<double>(updates);
        stats.value_loss /= static_cast<double>(updates);
        stats.approx_kl /= static_cast<double>(updates);
    }
    return stats;
}

struct TrainOptions {
    int total_iters{100};
    int checkpoint_every{10};
    std::string out_dir{"."};
    std::uint64_t seed{0};
    bool verbose{true};
};

struct TrainResult {
    std::vector<std::string> checkpoint_paths;
    std::string best_checkpoint;
    double first_iter_return{0.0};
    double best_return{-std::numeric_limits<double>::infinity()};
    PolicyParams final_params;
};

// Iterates collect -> GAE -> update. Environments run sequentially in index
// order, so a fixed seed reproduces the batch byte for byte. Env must expose
// obs_dim(), reset() -> obs and step(Action) -> {obs, reward, done, reason}.
template <typename Env>
TrainResult train_loop(std::vector<Env>& envs, PolicyParams params,
                       const PPOConfig& cfg, const TrainOptions& opt) {
    namespace fs = std::filesystem;
    const int num_envs = static_cast<int>(envs.size());
    if (num_envs == 0) throw std::invalid_argument("train_loop: no environments");
    const int obs_dim = params.spec().obs_dim();
    const int act_dim = params.spec().action_dim;

    fs::create_directories(opt.out_dir);
    std::ofstream log(fs::path(opt.out_dir) / "training_log.csv",
                      std::ios::trunc);
    log << "iter,mean_return,mean_ep_len,actor_loss,value_loss,entropy,kl\n";

    AdamState adam(params.size());
    RngStream act_rng = RngStream(opt.seed).substream(0x11);
    RngStream shuffle_rng = RngStream(opt.seed).substream(0x22);

    TrainResult result;
    auto checkpoint_path = [&](int iter) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "checkpoint_%05d.bin", iter);
        return (fs::path(opt.out_dir) / buf).string();
    };
    save_checkpoint(params, checkpoint_path(0));
    result.checkpoint_paths.push_back(checkpoint_path(0));
    result.best_checkpoint = checkpoint_path(0);

    std::vector<std::vector<double>> obs(num_envs);
    std::vector<double> episode_return(num_envs, 0.0);
    std::vector<int> episode_len(num_envs, 0);
    for (int e = 0; e < num_envs; ++e) obs[e] = envs[e].reset();

    const int steps = cfg.steps_per_iter;
    const long batch_n = static_cast<long>(steps) * num_envs;

    for (int iter = 1; iter <= opt.total_iters; ++iter) {
        RolloutBatch batch;
        batch.obs.resize(obs_dim, batch_n);
        batch.pre_squash.resize(act_dim, batch_n);
        batch.actions.resize(act_dim, batch_n);
        batch.log_prob.resize(batch_n);
        batch.reward.resize(batch_n);
        batch.value.resize(batch_n);
        batch.done.assign(batch_n, 0);
        batch.end_value = VectorXd::Zero(batch_n);
        batch.env_start.resize(num_envs + 1);
        batch.bootstrap_value = VectorXd::Zero(num_envs);
        for (int e = 0; e <= num_envs; ++e) batch.env_start[e] = e * steps;

        double sum_returns = 0.0;
        double sum_lens = 0.0;
        int finished = 0;
        std::map<std::string, int> term_counts;

        for (int e = 0; e < num_envs; ++e) {
            for (int s = 0; s < steps; ++s) {
                long at = static_cast<long>(e) * steps + s;
                ActResult act = policy_act(params, obs[e], act_rng, false);
                for (int i = 0; i < obs_dim; ++i) batch.obs(i, at) = obs[e][i];
                for (int i = 0; i < act_dim; ++i) {
                    batch.pre_squash(i, at) = act.pre_squash[i];
                    batch.actions(i, at) = act.action(i);
                }
                batch.log_prob(at) = act.log_prob;
                batch.value(at) = act.value;

                auto sr = envs[e].step(act.action);
                batch.reward(at) = sr.reward;
                batch.done[at] = sr.done ? 1 : 0;
                episode_return[e] += sr.reward;
                episode_len[e] += 1;

                if (sr.done) {
                    RolloutBatch::EpisodeMeta meta;
                    meta.episode_return = episode_return[e];
                    meta.length = episode_len[e];
                    meta.termination = sr.reason ? sr.reason : "timeout";
                    if (meta.termination == "timeout")
                        batch.end_value(at) =
                            network_forward(params, sr.obs).value;
                    batch.episodes.push_back(meta);
                    sum_returns += episode_return[e];
                    sum_lens += episode_len[e];
                    term_counts[meta.termination] += 1;
                    ++finished;
                    episode_return[e] = 0.0;
                    episode_len[e] = 0;
                    obs[e] = envs[e].reset();
                } else {
                    obs[e] = sr.obs;
                }
            }
            if (!batch.done[static_cast<long>(e) * steps + steps - 1])
                batch.bootstrap_value(e) = network_forward(params, obs[e]).value;
        }

        PPOConfig iter_cfg = cfg;
        if (cfg.anneal_lr)
            iter_cfg.lr = cfg.lr * (1.0 - static_cast<double>(iter - 1) /
                                              opt.total_iters);
        UpdateStats st = ppo_update(params, batch, iter_cfg, adam, shuffle_rng);

        double mean_ret = finished > 0 ? sum_returns / finished : 0.0;
        double mean_len = finished > 0 ? sum_lens / finished : 0.0;
        if (iter == 1) result.first_iter_return = mean_ret;
        char row[256];
        std::snprintf(row, sizeof(row), "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      iter, mean_ret, mean_len, st.actor_loss, st.value_loss,
                      st.entropy, st.approx_kl);
        log << row;

        if (opt.verbose) {
            std::printf("iter %4d  return %9.2f  len %7.1f  kl %.4f%s",
                        iter, mean_ret, mean_len, st.approx_kl,
                        st.aborted ? "  [update aborted]" : "");
            for (const auto& [k, v] : term_counts) std::printf("  %s:%d", k.c_str(), v);
            std::printf("\n");
            std::fflush(stdout);
        }

        bool is_checkpoint = iter % opt.checkpoint_every == 0 ||
                             iter == opt.total_iters;
        if (is_checkpoint) {
            std::string path = checkpoint_path(iter);
            save_checkpoint(params, path);
            result.checkpoint_paths.push_back(path);
        }
        if (finished > 0 && mean_ret > result.best_return) {
            result.best_return = mean_ret;
            std::string path = (fs::path(opt.out_dir) / "checkpoint_best.bin").string();
            save_checkpoint(params, path);
            result.best_checkpoint = path;
        }
    }
    result.final_params = params;
    return result;
}

}  // namespace cablequad

#endif  // CABLEQUAD_PPO_HPP_
