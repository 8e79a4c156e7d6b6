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

#ifndef CABLEQUAD_NETWORK_HPP_
#define CABLEQUAD_NETWORK_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cablequad/actuation.hpp"
#include "cablequad/math.hpp"

namespace cablequad {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Actor-critic architecture. History and preview blocks pass through
// single-layer MLP encoders whose embeddings join the present block before
// the 256x256 SiLU trunk. Actor and critic are fully separate stacks; the
// actor carries a state-independent learned log-std.
struct NetworkSpec {
    int present_dim{42};
    int history_dim{210};
    int preview_dim{60};
    int enc_hist{64};
    int enc_prev{32};
    int trunk{256};
    int action_dim{4};
    double log_std_init{std::log(0.3)};

    int obs_dim() const { return present_dim + history_dim + preview_dim; }

    int trunk_in() const {
        return present_dim + (history_dim > 0 ? enc_hist : 0) +
               (preview_dim > 0 ? enc_prev : 0);
    }
};

struct ParamShape {
    std::string name;
    long offset{0};
    long rows{0};
    long cols{0};  // 1 for vectors

    long count() const { return rows * cols; }
};

// Flat parameter vector plus a named layout manifest. All views are
// column-major maps into the flat storage.
class PolicyParams {
public:
    PolicyParams() = default;

    explicit PolicyParams(const NetworkSpec& spec) : spec_(spec) {
        build_manifest();
        flat_ = VectorXd::Zero(total_);
    }

    static PolicyParams zeros(const NetworkSpec& spec) {
        return PolicyParams(spec);
    }

    // He-style scaled normal init; the actor mean head starts small and the
    // log-std at its configured initial value.
    static PolicyParams random_init(const NetworkSpec& spec, RngStream& rng) {
        PolicyParams p(spec);
        for (const ParamShape& ps : p.manifest_) {
            double* data = p.flat_.data() + ps.offset;
            bool is_bias = ps.cols == 1 && ps.name.find(".b") != std::string::npos;
            bool is_logstd = ps.name.find("log_std") != std::string::npos;
            if (is_logstd) {
                for (long i = 0; i < ps.count(); ++i) data[i] = spec.log_std_init;
                continue;
            }
            if (is_bias) continue;  // zero biases
            double scale = std::sqrt(2.0 / static_cast<double>(ps.cols));
            if (ps.name == "actor.mean.W") scale *= 0.01;
            for (long i = 0; i < ps.count(); ++i) data[i] = scale * rng.normal();
        }
        return p;
    }

    const NetworkSpec& spec() const { return spec_; }
    const std::vector<ParamShape>& manifest() const { return manifest_; }
    long size() const { return total_; }

    VectorXd& flat() { return flat_; }
    const VectorXd& flat() const { return flat_; }

    Eigen::Map<const MatrixXd> view(const std::string& name) const {
        const ParamShape& ps = find(name);
        return {flat_.data() + ps.offset, ps.rows, ps.cols};
    }

    Eigen::Map<MatrixXd> view(const std::string& name) {
        const ParamShape& ps = find(name);
        return {flat_.data() + ps.offset, ps.rows, ps.cols};
    }

    bool has(const std::string& name) const {
        for (const auto& ps : manifest_)
            if (ps.name == name) return true;
        return false;
    }

    const ParamShape& find(const std::string& name) const {
        for (const auto& ps : manifest_)
            if (ps.name == name) return ps;
        throw std::out_of_range("PolicyParams: no parameter named " + name);
    }

private:
    void add(const std::string& name, long rows, long cols) {
        manifest_.push_back({name, total_, rows, cols});
        total_ += rows * cols;
    }

    void build_manifest() {
        total_ = 0;
        manifest_.clear();
        for (const char* head : {"actor", "critic"}) {
            std::string h = head;
            if (spec_.history_dim > 0) {
                add(h + ".enc_hist.W", spec_.enc_hist, spec_.history_dim);
                add(h + ".enc_hist.b", spec_.enc_hist, 1);
            }
            if (spec_.preview_dim > 0) {
                add(h + ".enc_prev.W", spec_.enc_prev, spec_.preview_dim);
                add(h + ".enc_prev.b", spec_.enc_prev, 1);
            }
            add(h + ".trunk1.W", spec_.trunk, spec_.trunk_in());
            add(h + ".trunk1.b", spec_.trunk, 1);
            add(h + ".trunk2.W", spec_.trunk, spec_.trunk);
            add(h + ".trunk2.b", spec_.trunk, 1);
        }
        add("actor.mean.W", spec_.action_dim, spec_.trunk);
        add("actor.mean.b", spec_.action_dim, 1);
        add("actor.log_std", spec_.action_dim, 1);
        add("critic.value.W", 1, spec_.trunk);
        add("critic.value.b", 1, 1);
    }

    NetworkSpec spec_{};
    std::vector<ParamShape> manifest_;
    VectorXd flat_;
    long total_{0};
};

namespace nn {

inline MatrixXd silu(const MatrixXd& z) {
    return z.array() * (1.0 / (1.0 + (-z.array()).exp()));
}

inline MatrixXd silu_grad(const MatrixXd& z) {
    auto sig = 1.0 / (1.0 + (-z.array()).exp());
    return (sig * (1.0 + z.array() * (1.0 - sig))).matrix();
}

// One head's cached activations for a batch (columns are samples).
struct StackCache {
    MatrixXd x_present, x_hist, x_prev;
    MatrixXd z_hist, a_hist, z_prev, a_prev_enc;
    MatrixXd concat;
    MatrixXd z1, a1, z2, a2;
};

struct ForwardCache {
    StackCache actor, critic;
    MatrixXd mean_raw;  // pre-squash actor mean, action_dim x N
    VectorXd log_std;   // action_dim
    VectorXd value;     // N
};

inline void split_obs(const NetworkSpec& s, const MatrixXd& obs,
                      MatrixXd& present, MatrixXd& hist, MatrixXd& prev) {
    present = obs.topRows(s.present_dim);
    hist = obs.middleRows(s.present_dim, s.history_dim);
    prev = obs.bottomRows(s.preview_dim);
}

inline MatrixXd stack_forward(const PolicyParams& p, const std::string& head,
                              const MatrixXd& obs, StackCache& c) {
    const NetworkSpec& s = p.spec();
    split_obs(s, obs, c.x_present, c.x_hist, c.x_prev);
    const long n = obs.cols();

    c.concat.resize(s.trunk_in(), n);
    long at = 0;
    c.concat.middleRows(at, s.present_dim) = c.x_present;
    at += s.present_dim;
    if (s.history_dim > 0) {
        c.z_hist = (p.view(head + ".enc_hist.W") * c.x_hist).colwise() +
                   VectorXd(p.view(head + ".enc_hist.b"));
        c.a_hist = silu(c.z_hist);
        c.concat.middleRows(at, s.enc_hist) = c.a_hist;
        at += s.enc_hist;
    }
    if (s.preview_dim > 0) {
        c.z_prev = (p.view(head + ".enc_prev.W") * c.x_prev).colwise() +
                   VectorXd(p.view(head + ".enc_prev.b"));
        c.a_prev_enc = silu(c.z_prev);
        c.concat.middleRows(at, s.enc_prev) = c.a_prev_enc;
    }

    c.z1 = (p.view(head + ".trunk1.W") * c.concat).colwise() +
           VectorXd(p.view(head + ".trunk1.b"));
    c.a1 = silu(c.z1);
    c.z2 = (p.view(head + ".trunk2.W") * c.a1).colwise() +
           VectorXd(p.view(head + ".trunk2.b"));
    c.a2 = silu(c.z2);
    return c.a2;
}

// Backprop through one head given the gradient at its trunk output.
// Accumulates into `grad` (same layout as the flat parameter vector).
inline void stack_backward(const PolicyParams& p, const std::string& head,
                           const StackCache& c, const MatrixXd& da2,
                           VectorXd& grad) {
    const NetworkSpec& s = p.spec();
    auto gview = [&](const std::string& name) -> Eigen::Map<MatrixXd> {
        const ParamShape& ps = p.find(name);
        return {grad.data() + ps.offset, ps.rows, ps.cols};
    };

    MatrixXd dz2 = da2.cwiseProduct(silu_grad(c.z2));
    gview(head + ".trunk2.W") += dz2 * c.a1.transpose();
    gview(head + ".trunk2.b") += dz2.rowwise().sum();
    MatrixXd da1 = p.view(head + ".trunk2.W").transpose() * dz2;

    MatrixXd dz1 = da1.cwiseProduct(silu_grad(c.z1));
    gview(head + ".trunk1.W") += dz1 * c.concat.transpose();
    gview(head + ".trunk1.b") += dz1.rowwise().sum();
    MatrixXd dconcat = p.view(head + ".trunk1.W").transpose() * dz1;

    long at = s.present_dim;  // gradient w.r.t. raw observation is not needed
    if (s.history_dim > 0) {
        MatrixXd da_h = dconcat.middleRows(at, s.enc_hist);
        MatrixXd dz_h = da_h.cwiseProduct(silu_grad(c.z_hist));
        gview(head + ".enc_hist.W") += dz_h * c.x_hist.transpose();
        gview(head + ".enc_hist.b") += dz_h.rowwise().sum();
        at += s.enc_hist;
    }
    if (s.preview_dim > 0) {
        MatrixXd da_p = dconcat.middleRows(at, s.enc_prev);
        MatrixXd dz_p = da_p.cwiseProduct(silu_grad(c.z_prev));
        gview(head + ".enc_prev.W") += dz_p * c.x_prev.transpose();
        gview(head + ".enc_prev.b") += dz_p.rowwise().sum();
    }
}

// Batched forward through both heads. `obs` has one sample per column.
inline void forward(const PolicyParams& p, const MatrixXd& obs,
                    ForwardCache& c) {
    const NetworkSpec& s = p.spec();
    if (obs.rows() != s.obs_dim())
        throw std::invalid_argument("network forward: observation dim mismatch");

    MatrixXd a2_actor = stack_forward(p, "actor", obs, c.actor);
    c.mean_raw = (p.view("actor.mean.W") * a2_actor).colwise() +
                 VectorXd(p.view("actor.mean.b"));
    c.log_std = p.view("actor.log_std");

    MatrixXd a2_critic = stack_forward(p, "critic", obs, c.critic);
    c.value = ((p.view("critic.value.W") * a2_critic).array() +
               p.view("critic.value.b")(0, 0))
                  .matrix()
                  .transpose();
}

// Backward from gradients at (raw mean, log_std, value) into `grad`.
inline void backward(const PolicyParams& p, const ForwardCache& c,
                     const MatrixXd& dmean_raw, const VectorXd& dlog_std,
                     const VectorXd& dvalue, VectorXd& grad) {
    auto gview = [&](const std::string& name) -> Eigen::Map<MatrixXd> {
        const ParamShape& ps = p.find(name);
        return {grad.data() + ps.offset, ps.rows, ps.cols};
    };

    gview("actor.mean.W") += dmean_raw * c.actor.a2.transpose();
    gview("actor.mean.b") += dmean_raw.rowwise().sum();
    gview("actor.log_std") += dlog_std;
    MatrixXd da2_actor = p.view("actor.mean.W").transpose() * dmean_raw;
    stack_backward(p, "actor", c.actor, da2_actor, grad);

    MatrixXd dvalue_row = dvalue.transpose();  // 1 x N
    gview("critic.value.W") += dvalue_row * c.critic.a2.transpose();
    gview("critic.value.b")(0, 0) += dvalue.sum();
    MatrixXd da2_critic = p.view("critic.value.W").transpose() * dvalue_row;
    stack_backward(p, "critic", c.critic, da2_critic, grad);
}

// Diagonal tanh-Gaussian log density of pre-squash samples u (one column
// per sample) under mean mu and per-dim log_std, including the tanh
// change-of-variable term.
inline VectorXd squashed_log_prob(const MatrixXd& u, const MatrixXd& mu,
                                  const VectorXd& log_std) {
    const double half_log_2pi = 0.5 * std::log(2.0 * kPi);
    VectorXd out = VectorXd::Zero(u.cols());
    for (long j = 0; j < u.cols(); ++j) {
        double lp = 0.0;
        for (long i = 0; i < u.rows(); ++i) {
            double sd = std::exp(log_std(i));
            double zi = (u(i, j) - mu(i, j)) / sd;
            lp += -0.5 * zi * zi - log_std(i) - half_log_2pi;
            // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
            double v = u(i, j);
            double softplus = v > 15.0 ? 0.0 : std::log1p(std::exp(-2.0 * v));
            if (v < -15.0) softplus = -2.0 * v;
            lp -= 2.0 * (std::log(2.0) - v - softplus);
        }
        out(j) = lp;
    }
    return out;
}

// Entropy of the pre-squash Gaussian (per sample; state independent).
inline double gaussian_entropy(const VectorXd& log_std) {
    return log_std.sum() +
           0.5 * static_cast<double>(log_std.size()) *
               (1.0 + std::log(2.0 * kPi));
}

}  // namespace nn

struct PolicyOutput {
    std::vector<double> mean;  // squashed, in [-1, 1]
    std::vector<double> log_std;
    double value{0.0};
};

// Deterministic single-sample forward: squashed action mean, log-std, value.
inline PolicyOutput network_forward(const PolicyParams& p,
                                    const std::vector<double>& obs) {
    if (static_cast<int>(obs.size()) != p.spec().obs_dim())
        throw std::invalid_argument("network_forward: observation dim mismatch");
    MatrixXd o(obs.size(), 1);
    for (std::size_t i = 0; i < obs.size(); ++i) o(i, 0) = obs[i];
    nn::ForwardCache c;
    nn::forward(p, o, c);
    PolicyOutput out;
    out.value = c.value(0);
    for (int i = 0; i < p.spec().action_dim; ++i) {
        out.mean.push_back(std::tanh(c.mean_raw(i, 0)));
        out.log_std.push_back(c.log_std(i));
    }
    return out;
}

struct ActResult {
    Action action{};
    double log_prob{0.0};
    double value{0.0};
    std::array<double, 4> pre_squash{};  // u, needed by the PPO update
};

// Sample (or take) an action. Stochastic mode draws in pre-squash space,
// squashes with tanh and reports the corrected log density; deterministic
// mode returns the squashed mean.
inline ActResult policy_act(const PolicyParams& p,
                            const std::vector<double>& obs, RngStream& rng,
                            bool deterministic) {
    MatrixXd o(obs.size(), 1);
    for (std::size_t i = 0; i < obs.size(); ++i) o(i, 0) = obs[i];
    nn::ForwardCache c;
    nn::forward(p, o, c);

    ActResult r;
    r.value = c.value(0);
    const int adim = p.spec().action_dim;
    MatrixXd u(adim, 1);
    for (int i = 0; i < adim; ++i) {
        if (deterministic) {
            u(i, 0) = c.mean_raw(i, 0);
        } else {
            double sd = std::exp(c.log_std(i));
            u(i, 0) = c.mean_raw(i, 0) + sd * rng.normal();
        }
    }
    for (int i = 0; i < adim && i < 4; ++i) {
        r.pre_squash[i] = u(i, 0);
        r.action(i) = std::clamp(std::tanh(u(i, 0)), -1.0, 1.0);
    }
    if (!deterministic)
        r.log_prob = nn::squashed_log_prob(u, c.mean_raw, c.log_std)(0);
    return r;
}

}  // namespace cablequad

#endif  // CABLEQUAD_NETWORK_HPP_
