#include "qwork/numeric.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <mutex>
#include <thread>

namespace qwork::numeric {

namespace odeint = boost::numeric::odeint;

namespace {

using PointState = std::array<double, 4>;
using MatrixState = std::array<double, 8>;

// i ḋ = [1 + λ f(t) p] H_S(t) d, with d split into (Re d0, Im d0, Re d1, Im d1).
struct PointRhs {
    double k2;
    double ct;
    double st;
    double omega;
    double lambda_p;
    const ProtocolSchedule* schedule;

    PointRhs(const DrivenQubit& q, const ProtocolSchedule& s, double lambda_p_)
        : k2(q.kappa * q.kappa), ct(std::cos(q.theta)), st(std::sin(q.theta)), omega(q.omega),
          lambda_p(lambda_p_), schedule(&s) {}

    void apply(const double* y, double* dy, double t) const {
        const double scale = lambda_p == 0.0 ? 1.0 : 1.0 + lambda_p * sampling_function_truncated(*schedule, t);
        const double a = k2 * t * scale;
        const double c = std::cos(omega * t);
        const double sn = std::sin(omega * t);
        const double h0r = ct * y[0] + st * (c * y[2] + sn * y[3]);
        const double h0i = ct * y[1] + st * (c * y[3] - sn * y[2]);
        const double h1r = st * (c * y[0] - sn * y[1]) - ct * y[2];
        const double h1i = st * (c * y[1] + sn * y[0]) - ct * y[3];
        dy[0] = a * h0i;
        dy[1] = -a * h0r;
        dy[2] = a * h1i;
        dy[3] = -a * h1r;
    }

    void operator()(const PointState& y, PointState& dy, double t) const { apply(y.data(), dy.data(), t); }
    void operator()(const MatrixState& y, MatrixState& dy, double t) const {
        apply(y.data(), dy.data(), t);
        apply(y.data() + 4, dy.data() + 4, t);
    }
};

PointState pack(const Eigen::Vector2cd& d) { return {d(0).real(), d(0).imag(), d(1).real(), d(1).imag()}; }

Eigen::Vector2cd unpack(const PointState& y) {
    return Eigen::Vector2cd(cdouble(y[0], y[1]), cdouble(y[2], y[3]));
}

struct TimeGrid {
    std::vector<double> t;
    std::vector<char> active;               // per interval [t_j, t_{j+1}]
    std::vector<std::size_t> checkpoints;   // indices into t
};

TimeGrid build_time_grid(const ProtocolSchedule& s, double t0, double t1, double h) {
    const double reach = kWindowSupport * s.delta;
    const std::array<double, 4> marks = {s.t_i - reach, s.t_i + reach, s.t_f - reach, s.t_f + reach};
    const auto windows = active_intervals(s);
    const double eps = 1e-12 * std::max(1.0, std::abs(t1));

    std::vector<double> breaks = {t0, t1};
    auto add = [&](double x) {
        if (x > t0 + eps && x < t1 - eps) breaks.push_back(x);
    };
    for (double x : marks) add(x);
    add(s.t_i);
    add(s.t_f);
    for (const auto& [lo, hi] : windows) {
        add(lo);
        add(hi);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [&](double a, double b) { return b - a <= eps; }),
                 breaks.end());

    TimeGrid g;
    g.t.push_back(breaks.front());
    for (std::size_t k = 1; k < breaks.size(); ++k) {
        const double gap = breaks[k] - breaks[k - 1];
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / h - 1e-9)));
        for (std::size_t j = 1; j < pieces; ++j)
            g.t.push_back(breaks[k - 1] + gap * static_cast<double>(j) / static_cast<double>(pieces));
        g.t.push_back(breaks[k]);
    }
    for (std::size_t j = 0; j + 1 < g.t.size(); ++j) {
        const double mid = 0.5 * (g.t[j] + g.t[j + 1]);
        bool on = false;
        for (const auto& [lo, hi] : windows) on = on || (mid > lo && mid < hi);
        g.active.push_back(on ? 1 : 0);
    }
    for (std::size_t j = 0; j < g.t.size(); ++j) {
        bool keep = (j == 0) || (j + 1 == g.t.size());
        for (double x : marks) keep = keep || std::abs(g.t[j] - x) <= eps;
        if (keep) g.checkpoints.push_back(j);
    }
    return g;
}

// Runs fn(chunk) for chunk in [0, n) on up to `threads` workers. Results are
// written per chunk by the caller, so the outcome does not depend on the
// thread count.
template <class Fn>
void for_each_chunk(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t c = 0; c < n; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < n; c = next++) {
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

constexpr std::size_t kChunks = 64;

}  // namespace

// ------------------------------ Grid ----------------------------------------

MomentumGrid MomentumGrid::uniform(std::size_t n, double p_max) {
    if (n < 3) throw std::invalid_argument("momentum grid: need at least 3 points");
    if (!(p_max > 0.0)) throw std::invalid_argument("momentum grid: p_max must be > 0");
    MomentumGrid g;
    g.p = linspace(-p_max, p_max, n);
    g.dp = 2.0 * p_max / static_cast<double>(n - 1);
    g.p_max = p_max;
    return g;
}

void MomentumGrid::validate(const ApparatusSpec& a, double w_max_target) const {
    if (p_max < 6.0 * a.sigma_p) throw std::invalid_argument("momentum grid: p_max must be >= 6 sigma_p");
    if (w_max_target > 0.0 && dp > std::numbers::pi / (std::abs(a.lambda) * w_max_target)) {
        std::ostringstream os;
        os << "momentum grid: dp = " << dp << " cannot resolve |W| up to " << w_max_target;
        throw std::invalid_argument(os.str());
    }
}

MomentumGrid default_grid(const ApparatusSpec& a, std::size_t n, double extent) {
    return MomentumGrid::uniform(n, extent * a.sigma_p);
}

MomentumGrid refine(const MomentumGrid& grid) { return MomentumGrid::uniform(4 * grid.size() - 3, 2.0 * grid.p_max); }

double CoefficientField::norm() const {
    KahanSum s;
    for (const auto& v : c) s.add(v.squaredNorm());
    return s.value() * grid.dp;
}

// ------------------------------ Propagation ---------------------------------

Eigen::Matrix2cd system_propagator(const DrivenQubit& q, double from, double to, double rtol) {
    if (from == to) return Eigen::Matrix2cd::Identity();
    MatrixState y = {1, 0, 0, 0, 0, 0, 1, 0};
    const ProtocolSchedule unused;
    PointRhs rhs(q, unused, 0.0);
    auto stepper = odeint::make_controlled(rtol * 1e-2, rtol, odeint::runge_kutta_dopri5<MatrixState>());
    const double dt0 = (to - from) / 64.0;
    odeint::integrate_adaptive(stepper, rhs, y, from, to, dt0);
    Eigen::Matrix2cd u;
    u(0, 0) = cdouble(y[0], y[1]);
    u(1, 0) = cdouble(y[2], y[3]);
    u(0, 1) = cdouble(y[4], y[5]);
    u(1, 1) = cdouble(y[6], y[7]);
    return u;
}

CoefficientField prepare_initial_coefficients(const DrivenQubit& q, const Eigen::Vector2cd& target,
                                              const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                              const MomentumGrid& grid) {
    q.validate();
    schedule.validate();
    a.validate();
    if (std::abs(target.squaredNorm() - 1.0) > 1e-10)
        throw std::invalid_argument("prepare_initial_coefficients: target must be normalised");
    const Eigen::Vector2cd psi_p = system_propagator(q, schedule.t_i, schedule.t_p) * target;
    CoefficientField f;
    f.time = schedule.t_p;
    f.grid = grid;
    f.c.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        f.c[k] = psi_p * apparatus_momentum_amplitude(a, grid.p[k], schedule.t_p, schedule.t_p);
    return f;
}

Trajectory evolve_coefficients(const CoefficientField& field, const DrivenQubit& q,
                               const ProtocolSchedule& schedule, const ApparatusSpec& a, double t_end,
                               const SolverOptions& options) {
    q.validate();
    schedule.validate();
    a.validate();
    const double t0 = field.time;
    if (t_end > schedule.t_m + 1e-12) throw std::invalid_argument("evolve_coefficients: t_end beyond t_m");
    if (t0 < schedule.t_p - 1e-12) throw std::invalid_argument("evolve_coefficients: field precedes t_p");
    if (!(t_end > t0)) throw std::invalid_argument("evolve_coefficients: t_end must follow the field time");
    if (field.c.size() != field.grid.size()) throw std::invalid_argument("evolve_coefficients: field/grid mismatch");

    const double h = options.sample_step > 0.0 ? options.sample_step
                                               : std::min(schedule.delta / 40.0, (t_end - t0) / 800.0);
    const TimeGrid tg = build_time_grid(schedule, t0, t_end, h);
    const std::size_t nt = tg.t.size();
    const std::size_t np = field.grid.size();

    std::vector<Eigen::Matrix2cd> step_u(nt - 1);
    for (std::size_t j = 0; j + 1 < nt; ++j) step_u[j] = system_propagator(q, tg.t[j], tg.t[j + 1]);

    // Pointer amplitude at t_p; |c(t,p)|² = amp² |d|² for all t.
    std::vector<double> amp(np);
    double amp_peak = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
        amp[k] = std::abs(apparatus_momentum_amplitude(a, field.grid.p[k], schedule.t_p, schedule.t_p));
        amp_peak = std::max(amp_peak, amp[k]);
    }
    const double cut = options.amplitude_cutoff * amp_peak;

    const std::size_t ncp = tg.checkpoints.size();
    std::vector<std::vector<Eigen::Vector2cd>> cp_d(ncp, std::vector<Eigen::Vector2cd>(np));
    std::vector<std::ptrdiff_t> cp_slot(nt, -1);
    for (std::size_t c = 0; c < ncp; ++c) cp_slot[tg.checkpoints[c]] = static_cast<std::ptrdiff_t>(c);

    struct ChunkResult {
        std::vector<Eigen::Matrix2cd> rho, rate;
        std::size_t steps{0};
        double drift{0.0};
    };
    const std::size_t nchunks = std::min(kChunks, np);
    std::vector<ChunkResult> results(nchunks);

    for_each_chunk(nchunks, options.threads, [&](std::size_t chunk) {
        ChunkResult& r = results[chunk];
        r.rho.assign(nt, Eigen::Matrix2cd::Zero());
        r.rate.assign(nt, Eigen::Matrix2cd::Zero());
        const std::size_t k_lo = chunk * np / nchunks;
        const std::size_t k_hi = (chunk + 1) * np / nchunks;
        for (std::size_t k = k_lo; k < k_hi; ++k) {
            const double p = field.grid.p[k];
            const cdouble psi_a = apparatus_momentum_amplitude(a, p, t0, schedule.t_p);
            Eigen::Vector2cd d = std::abs(psi_a) > 0.0 ? Eigen::Vector2cd(field.c[k] / psi_a)
                                                       : Eigen::Vector2cd::Zero();
            const double start_norm = d.squaredNorm();
            const double weight = field.grid.dp * amp[k] * amp[k];
            const bool solve = amp[k] >= cut;
            const PointRhs rhs(q, schedule, a.lambda * p);

            auto record = [&](std::size_t j, const Eigen::Vector2cd& v) {
                PointState y = pack(v);
                PointState dy;
                rhs(y, dy, tg.t[j]);
                const Eigen::Vector2cd dv = unpack(dy);
                r.rho[j] += weight * (v * v.adjoint());
                r.rate[j] += weight * (dv * v.adjoint() + v * dv.adjoint());
                if (cp_slot[j] >= 0) cp_d[static_cast<std::size_t>(cp_slot[j])][k] = v;
            };

            record(0, d);
            std::size_t j = 0;
            while (j + 1 < nt) {
                if (solve && tg.active[j]) {
                    std::size_t j_end = j;
                    while (j_end + 1 < nt && tg.active[j_end]) ++j_end;
                    PointState y = pack(d);
                    auto stepper = odeint::make_controlled(options.atol, options.rtol,
                                                           odeint::runge_kutta_dopri5<PointState>());
                    std::size_t slot = j;
                    auto observer = [&](const PointState& s, double) {
                        if (slot > j) record(slot, unpack(s));
                        ++slot;
                    };
                    try {
                        r.steps += odeint::integrate_times(
                            stepper, std::cref(rhs), y, tg.t.begin() + static_cast<std::ptrdiff_t>(j),
                            tg.t.begin() + static_cast<std::ptrdiff_t>(j_end + 1), h / 4.0, observer,
                            odeint::max_step_checker(static_cast<int>(options.max_steps_per_sample)));
                    } catch (const std::exception& e) {
                        std::ostringstream os;
                        os << "evolve_coefficients: solver failed at p = " << p << " (grid index " << k
                           << ") between t = " << tg.t[j] << " and " << tg.t[j_end] << ": " << e.what();
                        throw numerical_error(os.str());
                    }
                    d = unpack(y);
                    j = j_end;
                } else {
                    d = step_u[j] * d;
                    ++j;
                    record(j, d);
                }
            }
            if (solve) r.drift = std::max(r.drift, std::abs(d.squaredNorm() - start_norm));
        }
    });

    Trajectory out;
    out.times = tg.t;
    out.rho.assign(nt, Eigen::Matrix2cd::Zero());
    out.rho_rate.assign(nt, Eigen::Matrix2cd::Zero());
    for (const auto& r : results) {
        for (std::size_t j = 0; j < nt; ++j) {
            out.rho[j] += r.rho[j];
            out.rho_rate[j] += r.rate[j];
        }
        out.steps += r.steps;
        out.max_point_drift = std::max(out.max_point_drift, r.drift);
    }
    for (std::size_t c = 0; c < ncp; ++c) {
        const double t = tg.t[tg.checkpoints[c]];
        CoefficientField f;
        f.time = t;
        f.grid = field.grid;
        f.c.resize(np);
        for (std::size_t k = 0; k < np; ++k)
            f.c[k] = cp_d[c][k] * apparatus_momentum_amplitude(a, field.grid.p[k], t, schedule.t_p);
        out.checkpoints.push_back(std::move(f));
    }
    out.norm_drift = std::abs(out.checkpoints.back().norm() - field.norm());
    return out;
}

// ------------------------------ Observables ---------------------------------

WorkDistribution work_distribution_numeric(const CoefficientField& field, const ApparatusSpec& a,
                                           const std::vector<double>& work_grid) {
    a.validate();
    const auto& g = field.grid;
    const std::size_t np = g.size();
    double peak = 0.0;
    for (const auto& v : field.c) peak = std::max(peak, v.squaredNorm());
    if (!(peak > 0.0)) throw numerical_error("work_distribution_numeric: empty field");

    // Only points carrying non-negligible amplitude enter the Fourier sum.
    std::size_t k_lo = 0;
    std::size_t k_hi = np;
    while (k_lo < np && field.c[k_lo].squaredNorm() < 1e-40 * peak) ++k_lo;
    while (k_hi > k_lo && field.c[k_hi - 1].squaredNorm() < 1e-40 * peak) --k_hi;

    WorkDistribution d;
    d.work = work_grid;
    d.density.resize(work_grid.size());
    d.time = field.time;
    d.engine = "numeric";
    d.parameters["p_max"] = g.p_max;
    d.parameters["dp"] = g.dp;
    d.parameters["momentum_points"] = static_cast<double>(np);

    const double edge = std::max(field.c.front().squaredNorm(), field.c.back().squaredNorm());
    if (edge > 1e-20 * peak) {
        std::ostringstream os;
        os << "spectral leakage: edge amplitude ratio " << edge / peak << " at p_max = " << g.p_max;
        d.warnings.push_back(os.str());
    }
    double w_abs_max = 0.0;
    for (double w : work_grid) w_abs_max = std::max(w_abs_max, std::abs(w));
    if (std::abs(a.lambda) * w_abs_max * g.dp > std::numbers::pi) {
        std::ostringstream os;
        os << "aliasing: |W| up to " << w_abs_max << " exceeds pi/(lambda dp) = "
           << std::numbers::pi / (std::abs(a.lambda) * g.dp);
        d.warnings.push_back(os.str());
    }

    const double prefactor = std::abs(a.lambda) * g.dp * g.dp / (2.0 * std::numbers::pi);
    constexpr std::size_t kReanchor = 64;
    for (std::size_t i = 0; i < work_grid.size(); ++i) {
        const double kx = a.lambda * work_grid[i];
        const cdouble step = std::polar(1.0, kx * g.dp);
        cdouble z0 = 0.0;
        cdouble z1 = 0.0;
        cdouble phase = 0.0;
        for (std::size_t k = k_lo; k < k_hi; ++k) {
            if ((k - k_lo) % kReanchor == 0) {
                phase = std::polar(1.0, kx * g.p[k]);
            } else {
                phase *= step;
            }
            z0 += field.c[k](0) * phase;
            z1 += field.c[k](1) * phase;
        }
        d.density[i] = prefactor * (std::norm(z0) + std::norm(z1));
    }
    return d;
}

Eigen::Matrix2cd reduced_system_state_numeric(const CoefficientField& field) {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    const std::size_t np = field.c.size();
    const std::size_t nchunks = std::min(kChunks, np);
    for (std::size_t chunk = 0; chunk < nchunks; ++chunk) {
        Eigen::Matrix2cd part = Eigen::Matrix2cd::Zero();
        for (std::size_t k = chunk * np / nchunks; k < (chunk + 1) * np / nchunks; ++k)
            part += field.c[k] * field.c[k].adjoint();
        rho += part;
    }
    return rho * field.grid.dp;
}

// ------------------------------ Runs ----------------------------------------

QubitRun mixed_state_run(const DrivenQubit& q, const std::vector<std::pair<double, Eigen::Vector2cd>>& components,
                         const ProtocolSchedule& schedule, const ApparatusSpec& a, const MomentumGrid& grid,
                         const std::vector<double>& work_grid, const SolverOptions& options) {
    if (components.empty()) throw std::invalid_argument("mixed state: no components");
    double total = 0.0;
    for (const auto& [w, v] : components) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixed state: weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("mixed state: weights must sum to 1");

    QubitRun out;
    bool first = true;
    for (const auto& [w, target] : components) {
        if (w == 0.0) continue;
        const auto init = prepare_initial_coefficients(q, target, schedule, a, grid);
        auto traj = evolve_coefficients(init, q, schedule, a, schedule.t_m, options);
        auto dist = work_distribution_numeric(traj.final_field(), a, work_grid);
        if (first) {
            out.distribution = std::move(dist);
            for (auto& v : out.distribution.density) v *= w;
            for (auto& m : traj.rho) m *= w;
            for (auto& m : traj.rho_rate) m *= w;
            out.trajectory = std::move(traj);
            first = false;
            continue;
        }
        for (std::size_t i = 0; i < dist.density.size(); ++i) out.distribution.density[i] += w * dist.density[i];
        for (const auto& msg : dist.warnings) out.distribution.warnings.push_back(msg);
        for (std::size_t j = 0; j < traj.rho.size(); ++j) {
            out.trajectory.rho[j] += w * traj.rho[j];
            out.trajectory.rho_rate[j] += w * traj.rho_rate[j];
        }
        out.trajectory.steps += traj.steps;
        out.trajectory.norm_drift = std::max(out.trajectory.norm_drift, traj.norm_drift);
        out.trajectory.max_point_drift = std::max(out.trajectory.max_point_drift, traj.max_point_drift);
    }
    return out;
}

WorkDistribution mixed_state_distribution(const DrivenQubit& q,
                                          const std::vector<std::pair<double, Eigen::Vector2cd>>& components,
                                          const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                          const MomentumGrid& grid, const std::vector<double>& work_grid,
                                          const SolverOptions& options) {
    return mixed_state_run(q, components, schedule, a, grid, work_grid, options).distribution;
}

QubitRun run_qubit(const DrivenQubit& q, const SystemState& target, const ProtocolSchedule& schedule,
                   const ApparatusSpec& a, const MomentumGrid& grid, const std::vector<double>& work_grid,
                   const SolverOptions& options) {
    if (target.dimension() != 2) throw std::invalid_argument("run_qubit: target must be a two-level state");
    std::vector<std::pair<double, Eigen::Vector2cd>> parts;
    for (auto& [w, v] : target.pure_components()) parts.emplace_back(w, Eigen::Vector2cd(v));
    // Renormalise away the dropped sub-1e-15 weights.
    double total = 0.0;
    for (const auto& pr : parts) total += pr.first;
    for (auto& pr : parts) pr.first /= total;
    return mixed_state_run(q, parts, schedule, a, grid, work_grid, options);
}

std::vector<double> qubit_mode_centers(const DrivenQubit& q, const ProtocolSchedule& schedule) {
    const double k2 = q.kappa * q.kappa;
    std::vector<double> out;
    for (double sf : {1.0, -1.0})
        for (double si : {1.0, -1.0}) out.push_back(k2 * (sf * schedule.t_f - si * schedule.t_i));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> qubit_work_grid(const DrivenQubit& q, const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                    std::size_t n) {
    return default_work_grid(qubit_mode_centers(q, schedule), sigma_width(a, schedule.t_m, schedule.t_p), n);
}

}  // namespace qwork::numeric
