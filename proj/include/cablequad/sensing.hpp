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

#ifndef CABLEQUAD_SENSING_HPP_
#define CABLEQUAD_SENSING_HPP_

#include <array>
#include <deque>
#include <stdexcept>
#include <vector>

#include "cablequad/actuation.hpp"
#include "cablequad/math.hpp"
#include "cablequad/params.hpp"
#include "cablequad/reference.hpp"
#include "cablequad/state.hpp"

namespace cablequad {

// Clipped Gaussian sensor noise, observation path only.
struct NoiseConfig {
    double sigma_x{0.01};          // m
    double clip_x{0.0025};         // m
    double sigma_v{0.02};          // m/s
    double clip_v{0.005};          // m/s
    double sigma_theta{kPi / 60.0};   // rad
    double clip_theta{kPi / 120.0};   // rad
    double sigma_omega{kPi / 30.0};   // rad/s
    double clip_omega{kPi / 60.0};    // rad/s

    bool silent() const {
        return sigma_x == 0.0 && sigma_v == 0.0 && sigma_theta == 0.0 &&
               sigma_omega == 0.0;
    }

    static NoiseConfig off() {
        NoiseConfig c;
        c.sigma_x = c.clip_x = 0.0;
        c.sigma_v = c.clip_v = 0.0;
        c.sigma_theta = c.clip_theta = 0.0;
        c.sigma_omega = c.clip_omega = 0.0;
        return c;
    }
};

inline SystemState add_sensor_noise(const SystemState& s,
                                    const NoiseConfig& cfg, RngStream& rng) {
    if (cfg.silent()) return s;
    SystemState n = s;
    n.quad.x += rng.normal_clipped_vec(cfg.sigma_x, cfg.clip_x);
    n.payload.x += rng.normal_clipped_vec(cfg.sigma_x, cfg.clip_x);
    n.quad.v += rng.normal_clipped_vec(cfg.sigma_v, cfg.clip_v);
    n.payload.v += rng.normal_clipped_vec(cfg.sigma_v, cfg.clip_v);
    Vec3 eta = rng.normal_clipped_vec(cfg.sigma_theta, cfg.clip_theta);
    n.quad.R = s.quad.R * so3_exp(eta);
    n.quad.omega += rng.normal_clipped_vec(cfg.sigma_omega, cfg.clip_omega);
    return n;
}

// Body-frame tracking error block: payload position/velocity then quadrotor
// position/velocity, each rotated by R^T.
inline std::array<double, 12> tracking_error(const SystemState& s,
                                             const ReferenceSample& ref) {
    Mat3 Rt = s.quad.R.transposed();
    Vec3 exp = Rt * (s.payload.x - ref.x_payload);
    Vec3 evp = Rt * (s.payload.v - ref.v_payload);
    Vec3 exq = Rt * (s.quad.x - ref.x_quad);
    Vec3 evq = Rt * (s.quad.v - ref.v_quad);
    return {exp.x, exp.y, exp.z, evp.x, evp.y, evp.z,
            exq.x, exq.y, exq.z, evq.x, evq.y, evq.z};
}

// Observation layout constants. Lengths: present 26 + 12 + 4, history H*42,
// preview F*12.
struct ObservationLayout {
    int history_len{5};       // H
    int preview_len{5};       // F
    double x_max{5.0};        // m, position normalization
    double v_max{5.0};        // m/s, velocity normalization
    bool payload_info{true};  // append true (m_P, l); zeroed for ablations
    double dt_policy{0.01};   // s, preview spacing

    int size() const { return 42 + 42 * history_len + 12 * preview_len; }
};

// Normalized 26-entry state block: x_Q, R, x_P, v_Q, omega, v_P, m_P, l.
// In the payload-less configuration the payload slots mirror the quadrotor
// so the layout is identical across configurations.
inline std::array<double, 26> state_block(const SystemState& s,
                                          const SystemParams& p,
                                          const ObservationLayout& lay) {
    std::array<double, 26> b{};
    bool alias = !p.has_payload();
    Vec3 xp = alias ? s.quad.x : s.payload.x;
    Vec3 vp = alias ? s.quad.v : s.payload.v;
    int k = 0;
    for (int i = 0; i < 3; ++i) b[k++] = s.quad.x(i) / lay.x_max;
    for (int i = 0; i < 9; ++i) b[k++] = s.quad.R.m[i];
    for (int i = 0; i < 3; ++i) b[k++] = xp(i) / lay.x_max;
    for (int i = 0; i < 3; ++i) b[k++] = s.quad.v(i) / lay.v_max;
    for (int i = 0; i < 3; ++i) b[k++] = s.quad.omega(i);
    for (int i = 0; i < 3; ++i) b[k++] = vp(i) / lay.v_max;
    b[k++] = lay.payload_info ? p.m_payload : 0.0;
    b[k++] = lay.payload_info ? p.cable_length : 0.0;
    return b;
}

struct HistoryEntry {
    std::array<double, 26> state{};
    std::array<double, 6> x_desired{};  // x_Q^d then x_P^d
    std::array<double, 6> v_desired{};
    std::array<double, 4> action{};     // action preceding that state
};

// Fixed-capacity chronological buffer; oldest entries are evicted first and
// the flattened block is zero-padded until H steps have elapsed.
class HistoryBuffer {
public:
    explicit HistoryBuffer(int capacity = 5) : capacity_(capacity) {}

    void push(const HistoryEntry& e) {
        if (capacity_ == 0) return;
        if (static_cast<int>(entries_.size()) == capacity_) entries_.pop_front();
        entries_.push_back(e);
    }

    void clear() { entries_.clear(); }
    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(entries_.size()); }

    const HistoryEntry& at_oldest(int i) const { return entries_[i]; }

    // Flatten oldest-first into 42*H values, zero-padded at the old end.
    // `effective_len` masks the buffer down for history-length ablations.
    std::vector<double> flatten(int effective_len = -1) const {
        if (effective_len < 0 || effective_len > capacity_)
            effective_len = capacity_;
        std::vector<double> out(static_cast<std::size_t>(42) * capacity_, 0.0);
        int keep = std::min(effective_len, size());
        int pad = capacity_ - keep;
        for (int j = 0; j < keep; ++j) {
            // newest `keep` entries, preserving chronological order
            const HistoryEntry& e = entries_[size() - keep + j];
            double* dst = out.data() + static_cast<std::size_t>(42) * (pad + j);
            int k = 0;
            for (double v : e.state) dst[k++] = v;
            for (double v : e.x_desired) dst[k++] = v;
            for (double v : e.v_desired) dst[k++] = v;
            for (double v : e.action) dst[k++] = v;
        }
        return out;
    }

private:
    int capacity_;
    std::deque<HistoryEntry> entries_;
};

inline HistoryEntry make_history_entry(const SystemState& noisy,
                                       const ReferenceSample& ref,
                                       const Action& prev_action,
                                       const SystemParams& p,
                                       const ObservationLayout& lay) {
    HistoryEntry e;
    e.state = state_block(noisy, p, lay);
    for (int i = 0; i < 3; ++i) {
        e.x_desired[i] = ref.x_quad(i) / lay.x_max;
        e.x_desired[3 + i] = ref.x_payload(i) / lay.x_max;
        e.v_desired[i] = ref.v_quad(i) / lay.v_max;
        e.v_desired[3 + i] = ref.v_payload(i) / lay.v_max;
    }
    for (int i = 0; i < 4; ++i) e.action[i] = prev_action(i);
    return e;
}

// Full policy observation: [state | error | prev action | history | preview].
// `history_mask` (optional) limits how many recent history entries are
// visible, for the ablation protocol.
inline std::vector<double> assemble_observation(
    const SystemState& noisy, const ReferenceSpec& spec, double t,
    const HistoryBuffer& hist, const Action& prev_action,
    const ObservationLayout& lay, const SystemParams& p,
    int history_mask = -1) {
    if (hist.capacity() != lay.history_len)
        throw std::logic_error("assemble_observation: history capacity mismatch");

    std::vector<double> obs;
    obs.reserve(lay.size());

    ReferenceSample now = quadrotor_reference(t, spec, p.m_payload,
                                              p.cable_length, p.g);

    for (double v : state_block(noisy, p, lay)) obs.push_back(v);
    for (double v : tracking_error(noisy, now)) obs.push_back(v);
    for (int i = 0; i < 4; ++i) obs.push_back(prev_action(i));

    std::vector<double> past = hist.flatten(history_mask);
    obs.insert(obs.end(), past.begin(), past.end());

    Mat3 Rt = noisy.quad.R.transposed();
    bool alias = !p.has_payload();
    Vec3 xp = alias ? noisy.quad.x : noisy.payload.x;
    Vec3 vp = alias ? noisy.quad.v : noisy.payload.v;
    for (int k = 1; k <= lay.preview_len; ++k) {
        ReferenceSample fut = quadrotor_reference(
            t + k * lay.dt_policy, spec, p.m_payload, p.cable_length, p.g);
        Vec3 dxp = Rt * (xp - fut.x_payload);
        Vec3 dvp = Rt * (vp - fut.v_payload);
        Vec3 dxq = Rt * (noisy.quad.x - fut.x_quad);
        Vec3 dvq = Rt * (noisy.quad.v - fut.v_quad);
        for (int i = 0; i < 3; ++i) obs.push_back(dxp(i));
        for (int i = 0; i < 3; ++i) obs.push_back(dvp(i));
        for (int i = 0; i < 3; ++i) obs.push_back(dxq(i));
        for (int i = 0; i < 3; ++i) obs.push_back(dvq(i));
    }

    if (static_cast<int>(obs.size()) != lay.size())
        throw std::logic_error("assemble_observation: layout length mismatch");
    return obs;
}

}  // namespace cablequad

#endif  // CABLEQUAD_SENSING_HPP_
