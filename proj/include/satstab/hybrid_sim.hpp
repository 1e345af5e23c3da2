#pragma once

// Exact simulator of the saturated sampled-data closed loop: RK4 flow between
// measurement events, timers integrated exactly (they decrease at unit rate,
// so the next event time is analytic and steps are clipped to land on it),
// per-channel jump maps, hybrid time-domain bookkeeping and the Lyapunov /
// decay-envelope monitor.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "satstab/certify.hpp"
#include "satstab/lmi.hpp"
#include "satstab/matrix.hpp"

namespace satstab::sim {

using certify::DecayCertificate;
using certify::StabilityCertificate;
using lmi::PlantModel;

// ---------------------------------------------------------------------------
// saturation nonlinearities
// ---------------------------------------------------------------------------

inline Vector saturate(const Vector& v, const Vector& ubar) {
    if (v.size() != ubar.size())
        throw std::invalid_argument("saturate: dimension mismatch");
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double lim = ubar[i];
        out[i] = std::min(std::abs(v[i]), lim) * (v[i] >= 0.0 ? 1.0 : -1.0);
    }
    return out;
}

inline Vector deadzone(const Vector& v, const Vector& ubar) {
    Vector s = saturate(v, ubar);
    for (std::size_t i = 0; i < v.size(); ++i)
        s[i] -= v[i];
    return s;
}

// ---------------------------------------------------------------------------
// state, schedules, trajectories
// ---------------------------------------------------------------------------

struct HybridState {
    Vector xp;         // plant state
    Vector eta_tilde;  // controller reconstruction error x_p - eta
    Vector tau;        // per-channel timers in [0, T2_i]
};

class SamplingSchedule {
public:
    enum class Mode { constant_T2, uniform_random, sinusoidal };

    static SamplingSchedule constant() { return SamplingSchedule(Mode::constant_T2, 0, 0.0); }
    static SamplingSchedule uniform(std::uint64_t seed) {
        return SamplingSchedule(Mode::uniform_random, seed, 0.0);
    }
    static SamplingSchedule sinusoidal(double frequency) {
        return SamplingSchedule(Mode::sinusoidal, 0, frequency);
    }

    Mode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }
    double frequency() const { return freq_; }

    // Reset value for timer i after a jump at time t; always in [T1_i, T2_i].
    double next(int i, double t, const PlantModel& plant) {
        const double lo = plant.T1[i];
        const double hi = plant.T2[i];
        switch (mode_) {
        case Mode::constant_T2: return hi;
        case Mode::uniform_random: {
            std::uniform_real_distribution<double> dist(lo, hi);
            return dist(rng_);
        }
        case Mode::sinusoidal: {
            constexpr double two_pi = 6.283185307179586;
            return lo + (hi - lo) * 0.5 * (1.0 + std::sin(two_pi * freq_ * t));
        }
        }
        return hi;
    }

private:
    SamplingSchedule(Mode m, std::uint64_t seed, double freq)
        : mode_(m), seed_(seed), freq_(freq), rng_(seed) {}

    Mode mode_;
    std::uint64_t seed_;
    double freq_;
    std::mt19937_64 rng_;
};

struct TrajectorySample {
    double t = 0.0;
    int j = 0;
    HybridState state;
    double V = std::numeric_limits<double>::quiet_NaN();
    Vector u;  // applied (saturated) input
};

struct DomainInterval {
    double t_start = 0.0;
    double t_end = 0.0;
    int j = 0;
};

enum class TrajectoryStatus { completed, diverged, jump_limit };

struct HybridTrajectory {
    std::vector<TrajectorySample> samples;
    std::vector<DomainInterval> domain;
    TrajectoryStatus status = TrajectoryStatus::completed;
};

// Evaluation weights of the clock-dependent Lyapunov function, precomputed
// from a certificate once per run.
struct LyapunovWeights {
    Matrix Winv;
    std::vector<Matrix> R;
    Vector sigma;
    std::vector<int> partition;
    double mu_bar = 0.0;
};

inline LyapunovWeights lyapunov_weights(const PlantModel& plant,
                                        const StabilityCertificate& cert) {
    return LyapunovWeights{spd_inverse(cert.W), cert.R, cert.sigma, plant.partition,
                           cert.mu_bar};
}

// V(x) = x_p' W^{-1} x_p + sum_i exp(sigma_i tau_i) eta_i' R_i eta_i.
inline double lyapunov_eval(const HybridState& s, const LyapunovWeights& w) {
    double V = quadratic_form(w.Winv, s.xp);
    int o = 0;
    for (std::size_t b = 0; b < w.partition.size(); ++b) {
        const int d = w.partition[b];
        Vector eb(s.eta_tilde.begin() + o, s.eta_tilde.begin() + o + d);
        V += std::exp(w.sigma[b] * s.tau[b]) * quadratic_form(w.R[b], eb);
        o += d;
    }
    return V;
}

inline double lyapunov_eval(const HybridState& s, const PlantModel& plant,
                            const StabilityCertificate& cert) {
    return lyapunov_eval(s, lyapunov_weights(plant, cert));
}

// ---------------------------------------------------------------------------
// flow and jump maps
// ---------------------------------------------------------------------------

struct FlowDerivative {
    Vector dxp;
    Vector deta_tilde;
    Vector dtau;  // identically -1 per channel
};

inline Vector control_input(const HybridState& s, const Matrix& K) {
    Vector eta(s.xp.size());
    for (std::size_t i = 0; i < eta.size(); ++i)
        eta[i] = s.xp[i] - s.eta_tilde[i];
    return K * eta;  // v = K eta = K_cl x_bar
}

inline FlowDerivative flow_field(const HybridState& s, const PlantModel& plant,
                                 const Matrix& K) {
    for (int i = 0; i < plant.q(); ++i)
        if (s.tau[i] < -1e-9 || s.tau[i] > plant.T2[i] + 1e-9)
            throw std::runtime_error("flow_field: state outside the flow set");
    FlowDerivative d;
    const Vector u = saturate(control_input(s, K), plant.ubar);
    d.dxp = plant.A * s.xp;
    const Vector Bu = plant.B * u;
    for (std::size_t i = 0; i < d.dxp.size(); ++i)
        d.dxp[i] += Bu[i];
    d.deta_tilde = plant.A * s.eta_tilde;
    d.dtau.assign(plant.q(), -1.0);
    return d;
}

constexpr double kTimerTol = 1e-12;

// Applies the jump map once per channel whose timer reached zero, ascending
// channel order, and returns each intermediate post-jump state.
inline std::vector<HybridState> jump(const HybridState& s, SamplingSchedule& schedule,
                                     double t, const PlantModel& plant) {
    std::vector<HybridState> out;
    HybridState cur = s;
    for (int i = 0; i < plant.q(); ++i) {
        if (s.tau[i] > kTimerTol)
            continue;
        const int o = plant.blocks().offset(i);
        for (int k = 0; k < plant.partition[i]; ++k)
            cur.eta_tilde[o + k] = 0.0;
        cur.tau[i] = schedule.next(i, t, plant);
        out.push_back(cur);
    }
    if (out.empty())
        throw std::runtime_error("jump: no timer at zero");
    return out;
}

// ---------------------------------------------------------------------------
// simulation
// ---------------------------------------------------------------------------

struct Horizon {
    double t_max = 40.0;
    int j_max = 100000;
};

struct SimOptions {
    double h_max = 1e-3;
    double overflow = 1e12;
};

inline HybridTrajectory simulate(const HybridState& x0, const PlantModel& plant,
                                 const Matrix& K, SamplingSchedule schedule,
                                 const Horizon& horizon, const SimOptions& opts = {},
                                 const LyapunovWeights* lyap = nullptr) {
    plant.validate();
    const int n = plant.n();
    if (static_cast<int>(x0.xp.size()) != n || static_cast<int>(x0.eta_tilde.size()) != n ||
        static_cast<int>(x0.tau.size()) != plant.q())
        throw std::invalid_argument("simulate: initial state has wrong dimensions");
    for (int i = 0; i < plant.q(); ++i)
        if (x0.tau[i] < 0.0 || x0.tau[i] > plant.T2[i])
            throw std::invalid_argument("simulate: initial timers must lie in the timer set");

    HybridTrajectory traj;
    HybridState s = x0;
    double t = 0.0;
    int j = 0;
    double interval_start = 0.0;

    auto record = [&](double tt, int jj) {
        TrajectorySample smp;
        smp.t = tt;
        smp.j = jj;
        smp.state = s;
        smp.u = saturate(control_input(s, K), plant.ubar);
        if (lyap)
            smp.V = lyapunov_eval(s, *lyap);
        traj.samples.push_back(std::move(smp));
    };

    auto state_norm = [&]() {
        double m = 0.0;
        for (double v : s.xp)
            m = std::max(m, std::abs(v));
        for (double v : s.eta_tilde)
            m = std::max(m, std::abs(v));
        return m;
    };

    // RK4 on the (x_p, eta) error-coordinate flow; timers advance exactly.
    auto rk4_step = [&](double h) {
        auto f = [&](const HybridState& st) { return flow_field(st, plant, K); };
        auto advance = [&](const HybridState& st, const FlowDerivative& d, double a) {
            HybridState r = st;
            for (int i = 0; i < n; ++i) {
                r.xp[i] += a * d.dxp[i];
                r.eta_tilde[i] += a * d.deta_tilde[i];
            }
            return r;
        };
        const FlowDerivative k1 = f(s);
        const FlowDerivative k2 = f(advance(s, k1, 0.5 * h));
        const FlowDerivative k3 = f(advance(s, k2, 0.5 * h));
        const FlowDerivative k4 = f(advance(s, k3, h));
        for (int i = 0; i < n; ++i) {
            s.xp[i] += h / 6.0 * (k1.dxp[i] + 2.0 * k2.dxp[i] + 2.0 * k3.dxp[i] + k4.dxp[i]);
            s.eta_tilde[i] += h / 6.0 * (k1.deta_tilde[i] + 2.0 * k2.deta_tilde[i] +
                                         2.0 * k3.deta_tilde[i] + k4.deta_tilde[i]);
        }
        for (int i = 0; i < plant.q(); ++i)
            s.tau[i] -= h;
    };

    record(t, j);

    while (t < horizon.t_max - 1e-15 && j < horizon.j_max) {
        // due jumps, one channel per jump, ascending index
        bool jumped = false;
        for (int i = 0; i < plant.q() && j < horizon.j_max; ++i) {
            if (s.tau[i] > kTimerTol)
                continue;
            const int o = plant.blocks().offset(i);
            for (int k = 0; k < plant.partition[i]; ++k)
                s.eta_tilde[o + k] = 0.0;
            s.tau[i] = schedule.next(i, t, plant);
            ++j;
            traj.domain.push_back({interval_start, t, j - 1});
            interval_start = t;
            record(t, j);
            jumped = true;
        }
        if (jumped)
            continue;

        double dt_event = s.tau[0];
        for (int i = 1; i < plant.q(); ++i)
            dt_event = std::min(dt_event, s.tau[i]);
        const double h = std::min({opts.h_max, dt_event, horizon.t_max - t});
        if (!(h > 0.0))
            break;
        rk4_step(h);
        t += h;
        record(t, j);

        if (state_norm() > opts.overflow) {
            traj.status = TrajectoryStatus::diverged;
            break;
        }
    }
    if (traj.status == TrajectoryStatus::completed && j >= horizon.j_max)
        traj.status = TrajectoryStatus::jump_limit;
    traj.domain.push_back({interval_start, t, j});
    return traj;
}

// ---------------------------------------------------------------------------
// trajectory monitor
// ---------------------------------------------------------------------------

struct Violation {
    std::string kind;
    double t = 0.0;
    int j = 0;
    double amount = 0.0;
    std::string detail;
};

struct MonitorReport {
    std::vector<Violation> violations;
    int jump_checks = 0;
    int flow_checks = 0;
    int envelope_checks = 0;
    bool in_region_start = false;
    std::string note;

    bool clean() const { return violations.empty(); }
};

// Checks along a recorded trajectory:
//  (a) V never increases across a jump,
//  (b) while inside the certified region, V decays at least at rate c3/c2
//      between consecutive flow samples (integrated form, slack 1e-6 V),
//  (c) for in-region starts, the exponential envelope kappa e^{-lambda(t+j)},
//  (d) the dwell-time bound tau_D j <= t + q tau_D on the hybrid domain.
inline MonitorReport monitor(const HybridTrajectory& traj, const PlantModel& plant,
                             const StabilityCertificate& cert,
                             const std::optional<DecayCertificate>& decay_in = std::nullopt) {
    MonitorReport rep;
    if (traj.samples.empty())
        return rep;

    const LyapunovWeights w = lyapunov_weights(plant, cert);
    std::optional<DecayCertificate> decay = decay_in;
    if (!decay) {
        try {
            decay = certify::decay_certificate(plant, cert);
        } catch (const std::exception& e) {
            rep.note = std::string("decay constants unavailable: ") + e.what();
        }
    }

    auto V_of = [&](const TrajectorySample& smp) {
        return std::isnan(smp.V) ? lyapunov_eval(smp.state, w) : smp.V;
    };

    auto xbar_norm = [](const TrajectorySample& smp) {
        double ss = 0.0;
        for (double v : smp.state.xp)
            ss += v * v;
        for (double v : smp.state.eta_tilde)
            ss += v * v;
        return std::sqrt(ss);
    };

    const double V0 = V_of(traj.samples.front());
    rep.in_region_start = V0 <= cert.mu_bar;
    const double x0norm = xbar_norm(traj.samples.front());

    double tau_D = plant.T1[0];
    for (double t1 : plant.T1)
        tau_D = std::min(tau_D, t1);

    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const TrajectorySample& a = traj.samples[k];
        const TrajectorySample& b = traj.samples[k + 1];
        const double Va = V_of(a);
        const double Vb = V_of(b);

        if (b.j == a.j + 1 && b.t == a.t) {
            ++rep.jump_checks;
            if (Vb > Va + 1e-12 * (1.0 + Va))
                rep.violations.push_back(
                    {"jump_increase", b.t, b.j, Vb - Va, "V increased across jump"});
        } else if (b.j == a.j && decay) {
            const bool inside = Va <= cert.mu_bar && Vb <= cert.mu_bar;
            if (inside) {
                ++rep.flow_checks;
                const double rate = decay->c3 / decay->c2;
                const double bound = Va * std::exp(-rate * (b.t - a.t)) + 1e-6 * Va;
                if (Vb > bound)
                    rep.violations.push_back(
                        {"flow_decay", b.t, b.j, Vb - bound, "flow decrease bound violated"});
            }
        }
    }

    for (const TrajectorySample& smp : traj.samples) {
        if (tau_D * smp.j > smp.t + plant.q() * tau_D + 1e-9)
            rep.violations.push_back(
                {"dwell_time", smp.t, smp.j, tau_D * smp.j - smp.t - plant.q() * tau_D,
                 "hybrid domain violates the dwell-time bound"});
        if (rep.in_region_start && decay) {
            ++rep.envelope_checks;
            const double bound =
                decay->kappa * std::exp(-decay->lambda * (smp.t + smp.j)) * x0norm + 1e-9;
            if (xbar_norm(smp) > bound)
                rep.violations.push_back({"envelope", smp.t, smp.j, xbar_norm(smp) - bound,
                                          "exponential envelope violated"});
        }
    }
    return rep;
}

}  // namespace satstab::sim
