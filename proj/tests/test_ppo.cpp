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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "cablequad/ppo.hpp"

using namespace cablequad;

namespace {

// Batch with hand-filled rewards/values/dones over one environment.
RolloutBatch make_batch(const std::vector<double>& rewards,
                        const std::vector<double>& values,
                        const std::vector<int>& dones,
                        double bootstrap = 0.0) {
    RolloutBatch b;
    long n = static_cast<long>(rewards.size());
    b.obs = MatrixXd::Zero(1, n);
    b.pre_squash = MatrixXd::Zero(1, n);
    b.actions = MatrixXd::Zero(1, n);
    b.log_prob = VectorXd::Zero(n);
    b.reward = VectorXd::Zero(n);
    b.value = VectorXd::Zero(n);
    b.done.assign(n, 0);
    for (long i = 0; i < n; ++i) {
        b.reward(i) = rewards[i];
        b.value(i) = values[i];
        b.done[i] = static_cast<std::uint8_t>(dones[i]);
    }
    b.env_start = {0, static_cast<int>(n)};
    b.bootstrap_value = VectorXd::Constant(1, bootstrap);
    return b;
}

// One-step bandit: constant observation, reward 1 for positive first action
// channel, episodes end immediately.
struct BanditEnv {
    struct StepResult {
        std::vector<double> obs;
        double reward{0.0};
        bool done{true};
        const char* reason{"bandit"};
    };

    int obs_dim() const { return 4; }
    std::vector<double> reset() { return {1.0, 0.0, 0.0, 0.0}; }
    StepResult step(const Action& a) {
        StepResult r;
        r.obs = {1.0, 0.0, 0.0, 0.0};
        r.reward = a.collective > 0.0 ? 1.0 : 0.0;
        return r;
    }
};

NetworkSpec bandit_spec() {
    NetworkSpec s;
    s.present_dim = 4;
    s.history_dim = 0;
    s.preview_dim = 0;
    s.trunk = 16;
    s.action_dim = 1;
    return s;
}

PPOConfig bandit_config() {
    PPOConfig cfg;
    cfg.gamma = 0.99;
    cfg.lam = 0.95;
    cfg.epochs = 4;
    cfg.minibatches = 4;
    cfg.lr = 0.01;
    cfg.entropy_coeff = 1e-3;
    cfg.steps_per_iter = 64;
    cfg.num_envs = 4;
    return cfg;
}

double prob_positive_arm(const PolicyParams& params) {
    std::vector<double> obs{1.0, 0.0, 0.0, 0.0};
    MatrixXd o(4, 1);
    for (int i = 0; i < 4; ++i) o(i, 0) = obs[i];
    nn::ForwardCache c;
    nn::forward(params, o, c);
    double mu = c.mean_raw(0, 0);
    double sd = std::exp(c.log_std(0));
    return 0.5 * std::erfc(-mu / (sd * std::sqrt(2.0)));
}

}  // namespace

TEST_CASE("gae single terminal step") {
    PPOConfig cfg;
    cfg.gamma = 1.0;
    cfg.lam = 1.0;
    RolloutBatch b = make_batch({2.0}, {0.5}, {1});
    auto [adv, ret] = gae_advantages(b, cfg);
    CHECK(adv(0) == Catch::Approx(2.0 - 0.5));
    CHECK(ret(0) == Catch::Approx(2.0));
}

TEST_CASE("gae with zero deltas is zero") {
    PPOConfig cfg;
    cfg.gamma = 0.5;
    cfg.lam = 0.7;
    // r + gamma V' - V = 0 everywhere: V = (1, 0.5, ... ) with r = 0... use
    // V = 0 and r = 0.
    RolloutBatch b = make_batch({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0, 0, 1});
    auto [adv, ret] = gae_advantages(b, cfg);
    for (int i = 0; i < 3; ++i) CHECK(adv(i) == 0.0);
}

TEST_CASE("gae hand-unrolled three step episode") {
    PPOConfig cfg;
    cfg.gamma = 1.0;
    cfg.lam = 1.0;
    RolloutBatch b = make_batch({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {0, 0, 1});
    auto [adv, ret] = gae_advantages(b, cfg);
    CHECK(adv(0) == Catch::Approx(3.0));
    CHECK(adv(1) == Catch::Approx(2.0));
    CHECK(adv(2) == Catch::Approx(1.0));
}

TEST_CASE("done flags cut credit across episodes") {
    PPOConfig cfg;
    cfg.gamma = 1.0;
    cfg.lam = 1.0;
    RolloutBatch b =
        make_batch({1.0, 5.0, 1.0}, {0.0, 0.0, 0.0}, {0, 1, 1});
    auto [adv, ret] = gae_advantages(b, cfg);
    CHECK(adv(2) == Catch::Approx(1.0));  // new episode, no leak from before
    CHECK(adv(1) == Catch::Approx(5.0));
    CHECK(adv(0) == Catch::Approx(6.0));
}

TEST_CASE("truncated tail bootstraps from the final value") {
    PPOConfig cfg;
    cfg.gamma = 1.0;
    cfg.lam = 1.0;
    RolloutBatch b = make_batch({1.0}, {0.0}, {0}, 10.0);
    auto [adv, ret] = gae_advantages(b, cfg);
    CHECK(adv(0) == Catch::Approx(11.0));
}

TEST_CASE("time-limit episode ends bootstrap their terminal value") {
    PPOConfig cfg;
    cfg.gamma = 1.0;
    cfg.lam = 1.0;
    RolloutBatch b = make_batch({1.0, 1.0}, {0.0, 0.0}, {1, 1});
    b.end_value = VectorXd::Zero(2);
    b.end_value(0) = 7.0;  // truncation: V of the terminal observation
    b.end_value(1) = 0.0;  // failure
    auto [adv, ret] = gae_advantages(b, cfg);
    CHECK(adv(0) == Catch::Approx(8.0));
    CHECK(adv(1) == Catch::Approx(1.0));
}

TEST_CASE("clipped surrogate obeys the clip boundary") {
    // ratio at the old policy: loss is -A, full gradient
    auto [l0, g0] = clipped_surrogate(1.0, 2.0, 0.2);
    CHECK(l0 == Catch::Approx(-2.0));
    CHECK(g0 == Catch::Approx(-2.0));

    // ratio 1.5 with positive advantage: objective uses the 1.2 clip and
    // the gradient is cut
    auto [l1, g1] = clipped_surrogate(1.5, 1.0, 0.2);
    CHECK(l1 == Catch::Approx(-1.2));
    CHECK(g1 == 0.0);

    // ratio 0.5 with negative advantage: clipped at 0.8, gradient cut
    auto [l2, g2] = clipped_surrogate(0.5, -1.0, 0.2);
    CHECK(l2 == Catch::Approx(0.8));
    CHECK(g2 == 0.0);

    // ratio 1.5 with negative advantage: unclipped branch is the minimum,
    // gradient keeps pushing the ratio down
    auto [l3, g3] = clipped_surrogate(1.5, -1.0, 0.2);
    CHECK(l3 == Catch::Approx(1.5));
    CHECK(g3 == Catch::Approx(1.5));

    // inside the interval both branches agree
    auto [l4, g4] = clipped_surrogate(1.1, 0.7, 0.2);
    CHECK(l4 == Catch::Approx(-0.77));
    CHECK(g4 == Catch::Approx(-0.77));
}

TEST_CASE("advantage normalization hits zero mean unit deviation") {
    PPOConfig cfg;
    RngStream rng(3);
    std::vector<double> r(64), v(64);
    std::vector<int> d(64, 0);
    for (int i = 0; i < 64; ++i) {
        r[i] = rng.uniform(-2.0, 5.0);
        v[i] = rng.uniform(-1.0, 1.0);
        d[i] = (i % 16 == 15) ? 1 : 0;
    }
    RolloutBatch b = make_batch(r, v, d);
    auto [adv, ret] = normalized_advantages(b, cfg);
    double mean = adv.mean();
    double stddev = std::sqrt((adv.array() - mean).square().sum() / adv.size());
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(stddev - 1.0) < 1e-6);
}

TEST_CASE("stored log probs match a batched recomputation") {
    // ratio at the first minibatch of the first epoch must be 1
    NetworkSpec spec = bandit_spec();
    RngStream rng(5);
    PolicyParams p = PolicyParams::random_init(spec, rng);
    RngStream act_rng(17);
    BanditEnv env;
    const int n = 32;
    MatrixXd obs(spec.obs_dim(), n), u(1, n);
    VectorXd logp(n);
    std::vector<double> o = env.reset();
    for (int i = 0; i < n; ++i) {
        ActResult a = policy_act(p, o, act_rng, false);
        for (int k = 0; k < 4; ++k) obs(k, i) = o[k];
        u(0, i) = a.pre_squash[0];
        logp(i) = a.log_prob;
    }
    nn::ForwardCache c;
    nn::forward(p, obs, c);
    VectorXd relogp = nn::squashed_log_prob(u, c.mean_raw, c.log_std);
    for (int i = 0; i < n; ++i) {
        double ratio = std::exp(relogp(i) - logp(i));
        CHECK(std::abs(ratio - 1.0) < 1e-6);
    }
}

TEST_CASE("non-finite rewards abort the update and restore parameters") {
    NetworkSpec spec = bandit_spec();
    RngStream rng(6);
    PolicyParams p = PolicyParams::random_init(spec, rng);
    VectorXd before = p.flat();
    RolloutBatch b = make_batch({std::numeric_limits<double>::infinity()},
                                {0.0}, {1});
    b.obs = MatrixXd::Zero(spec.obs_dim(), 1);
    b.pre_squash = MatrixXd::Zero(1, 1);
    AdamState adam(p.size());
    RngStream shuffle(1);
    PPOConfig cfg = bandit_config();
    cfg.minibatches = 1;
    UpdateStats st = ppo_update(p, b, cfg, adam, shuffle);
    CHECK(st.aborted);
    CHECK((p.flat() - before).norm() == 0.0);
}

TEST_CASE("ppo solves the two-armed bandit") {
    NetworkSpec spec = bandit_spec();
    PPOConfig cfg = bandit_config();
    RngStream init_rng(12345);
    PolicyParams params = PolicyParams::random_init(spec, init_rng);

    std::vector<BanditEnv> envs(cfg.num_envs);
    TrainOptions opt;
    opt.total_iters = 120;
    opt.checkpoint_every = 1000;  // no intermediate checkpoints
    opt.out_dir = "bandit_test_out";
    opt.seed = 7;
    opt.verbose = false;
    TrainResult res = train_loop(envs, params, cfg, opt);

    CHECK(prob_positive_arm(res.final_params) > 0.9);
    std::filesystem::remove_all("bandit_test_out");
}

TEST_CASE("training is reproducible for a fixed seed") {
    NetworkSpec spec = bandit_spec();
    PPOConfig cfg = bandit_config();
    cfg.num_envs = 2;
    cfg.steps_per_iter = 16;

    auto run = [&](const std::string& dir) {
        RngStream init_rng(5);
        PolicyParams params = PolicyParams::random_init(spec, init_rng);
        std::vector<BanditEnv> envs(cfg.num_envs);
        TrainOptions opt;
        opt.total_iters = 3;
        opt.checkpoint_every = 3;
        opt.out_dir = dir;
        opt.seed = 99;
        opt.verbose = false;
        return train_loop(envs, params, cfg, opt);
    };
    TrainResult a = run("ppo_repro_a");
    TrainResult b = run("ppo_repro_b");
    CHECK((a.final_params.flat() - b.final_params.flat()).norm() == 0.0);

    auto read_bytes = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    std::string ca = read_bytes("ppo_repro_a/checkpoint_00003.bin");
    std::string cb = read_bytes("ppo_repro_b/checkpoint_00003.bin");
    REQUIRE(!ca.empty());
    CHECK(ca == cb);
    std::filesystem::remove_all("ppo_repro_a");
    std::filesystem::remove_all("ppo_repro_b");
}

TEST_CASE("zero iterations leaves only the initial checkpoint") {
    NetworkSpec spec = bandit_spec();
    PPOConfig cfg = bandit_config();
    cfg.num_envs = 1;
    cfg.steps_per_iter = 4;
    RngStream init_rng(5);
    PolicyParams params = PolicyParams::random_init(spec, init_rng);
    std::vector<BanditEnv> envs(1);
    TrainOptions opt;
    opt.total_iters = 0;
    opt.out_dir = "ppo_zero_out";
    opt.verbose = false;
    TrainResult res = train_loop(envs, params, cfg, opt);
    CHECK(res.checkpoint_paths.size() == 1);
    CHECK(std::filesystem::exists("ppo_zero_out/checkpoint_00000.bin"));
    std::filesystem::remove_all("ppo_zero_out");
}
