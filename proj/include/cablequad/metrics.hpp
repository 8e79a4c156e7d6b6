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

#ifndef CABLEQUAD_METRICS_HPP_
#define CABLEQUAD_METRICS_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cablequad/math.hpp"

namespace cablequad {

struct TrackingMetrics {
    double rmse_x{0.0}, rmse_y{0.0}, rmse_z{0.0};
    double rmse_total{0.0};        // Euclidean norm of the per-axis RMSEs
    double rmse_instant{0.0};      // RMS of the instantaneous error norm
    std::optional<double> settling_time;      // s
    std::optional<double> settling_periods;   // T_s / T_n
    std::optional<double> steady_state_error; // m, mean over the last 0.5 s
};

// Per-axis RMSE of (actual - desired); total is the norm of the per-axis
// values, with the RMS of the instantaneous norm kept as a secondary view.
inline TrackingMetrics rmse_metrics(const std::vector<Vec3>& actual,
                                    const std::vector<Vec3>& desired) {
    if (actual.empty() || actual.size() != desired.size())
        throw std::invalid_argument("rmse_metrics: empty or misaligned series");
    double sx = 0.0, sy = 0.0, sz = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        Vec3 e = actual[i] - desired[i];
        sx += e.x * e.x;
        sy += e.y * e.y;
        sz += e.z * e.z;
        sn += e.norm_squared();
    }
    double n = static_cast<double>(actual.size());
    TrackingMetrics m;
    m.rmse_x = std::sqrt(sx / n);
    m.rmse_y = std::sqrt(sy / n);
    m.rmse_z = std::sqrt(sz / n);
    m.rmse_total = std::sqrt(m.rmse_x * m.rmse_x + m.rmse_y * m.rmse_y +
                             m.rmse_z * m.rmse_z);
    m.rmse_instant = std::sqrt(sn / n);
    return m;
}

// Natural period of the cable pendulum; no payload or zero length has none.
inline std::optional<double> natural_period(double cable_length,
                                            double g = 9.81) {
    if (cable_length <= 0.0) return std::nullopt;
    return 2.0 * kPi * std::sqrt(cable_length / g);
}

struct SettlingMetrics {
    std::optional<double> settling_time;
    std::optional<double> settling_periods;
    std::optional<double> steady_state_error;
};

// T_s = first time after which |e| stays within eps for a dwell of tau.
// e_ss is the mean error over the trailing 0.5 s.
inline SettlingMetrics settling_metrics(const std::vector<double>& error_norm,
                                        double dt, double cable_length,
                                        double eps = 0.01, double tau = 0.5) {
    if (error_norm.empty() || (error_norm.size() - 1) * dt < tau)
        throw std::invalid_argument("settling_metrics: series shorter than tau");

    SettlingMetrics out;
    const int n = static_cast<int>(error_norm.size());
    const int dwell = static_cast<int>(tau / dt + 0.5);

    int run_start = -1;
    for (int i = 0; i < n; ++i) {
        if (error_norm[i] <= eps) {
            if (run_start < 0) run_start = i;
            if (i - run_start >= dwell) break;
        } else {
            run_start = -1;
        }
    }
    if (run_start >= 0 && (n - 1) - run_start >= dwell)
        out.settling_time = run_start * dt;

    if (auto tn = natural_period(cable_length); tn && out.settling_time)
        out.settling_periods = *out.settling_time / *tn;

    int tail = std::min(n, static_cast<int>(0.5 / dt + 0.5) + 1);
    double acc = 0.0;
    for (int i = n - tail; i < n; ++i) acc += error_norm[i];
    out.steady_state_error = acc / tail;
    return out;
}

}  // namespace cablequad

#endif  // CABLEQUAD_METRICS_HPP_
