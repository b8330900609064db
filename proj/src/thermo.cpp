#include "qwork/thermo.hpp"

#include "qwork/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qwork::thermo {

namespace {

// Sample spacing of system-only qubit solves; the Hermite error at this
// spacing is below 1e-10 for the figure parameters.
constexpr double kFreeStep = 2.5e-3;

constexpr std::array<double, 4> kGaussNodes = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                  0.3478548451374538};

Eigen::MatrixXcd commutator_rate(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& rho) {
    return cdouble(0.0, -1.0) * (h * rho - rho * h);
}

Eigen::MatrixXcd hermite(const StateTrajectory& tr, std::size_t j, double t) {
    const double t0 = tr.times[j];
    const double h = tr.times[j + 1] - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * tr.states[j] + (s3 - 2 * s2 + s) * h * tr.rates[j] +
           (-2 * s3 + 3 * s2) * tr.states[j + 1] + (s3 - s2) * h * tr.rates[j + 1];
}

double gauss_legendre(const StateTrajectory& tr, const HamiltonianModel& model, Interval iv) {
    KahanSum sum;
    for (std::size_t j = 0; j + 1 < tr.times.size(); ++j) {
        const double lo = std::max(iv.a, tr.times[j]);
        const double hi = std::min(iv.b, tr.times[j + 1]);
        if (hi <= lo) continue;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
            const double t = mid + half * kGaussNodes[g];
            sum.add(half * kGaussWeights[g] * (model.h_rate(t) * hermite(tr, j, t)).trace().real());
        }
    }
    return sum.value();
}

// Every other sample inside [a, b], counted from the first one, keeping
// the samples at and beyond both ends.
StateTrajectory coarsen(const StateTrajectory& tr, Interval iv) {
    const auto first = static_cast<std::size_t>(std::lower_bound(tr.times.begin(), tr.times.end(), iv.a) - tr.times.begin());
    const auto last = static_cast<std::size_t>(std::upper_bound(tr.times.begin(), tr.times.end(), iv.b) - tr.times.begin()) - 1;
    if (first >= tr.times.size() || last < first + 2) {
        std::ostringstream os;
        os << "work_integral: fewer than two sample intervals inside [" << iv.a << ", " << iv.b
           << "], the error cannot be estimated";
        throw numerical_error(os.str());
    }
    StateTrajectory out;
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        if (j <= first || j >= last || (j - first) % 2 == 0) {
            out.times.push_back(tr.times[j]);
            out.states.push_back(tr.states[j]);
            out.rates.push_back(tr.rates[j]);
        }
    }
    return out;
}

void check_interval(const StateTrajectory& tr, Interval iv, const char* what) {
    tr.validate();
    const double slack = 1e-12 * std::max(1.0, std::abs(tr.times.back()));
    if (!(iv.a <= iv.b) || iv.a < tr.times.front() - slack || iv.b > tr.times.back() + slack) {
        std::ostringstream os;
        os << what << ": interval [" << iv.a << ", " << iv.b << "] outside the trajectory ["
           << tr.times.front() << ", " << tr.times.back() << "]";
        throw std::invalid_argument(os.str());
    }
}

bool same_interval(Interval x, Interval y) {
    return std::abs(x.a - y.a) <= 1e-12 * std::max(1.0, std::abs(x.a)) &&
           std::abs(x.b - y.b) <= 1e-12 * std::max(1.0, std::abs(x.b));
}

}  // namespace

HamiltonianModel model_of(const DrivenQubit& q) {
    q.validate();
    return {[q](double t) { return Eigen::MatrixXcd(qubit_hamiltonian(q, t)); },
            [q](double t) { return Eigen::MatrixXcd(qubit_hamiltonian_rate(q, t)); }};
}

HamiltonianModel model_of(const SpectralSystem& sys) {
    return {[sys](double t) { return sys.hamiltonian(t); }, [sys](double t) { return sys.hamiltonian_rate(t); }};
}

void StateTrajectory::validate() const {
    if (times.size() < 2) throw std::invalid_argument("state trajectory: need at least two samples");
    if (states.size() != times.size() || rates.size() != times.size())
        throw std::invalid_argument("state trajectory: sample count mismatch");
    for (std::size_t j = 0; j + 1 < times.size(); ++j)
        if (!(times[j + 1] > times[j])) throw std::invalid_argument("state trajectory: times must increase");
}

Eigen::MatrixXcd StateTrajectory::state_at(double t) const {
    validate();
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto j = static_cast<std::size_t>(it - times.begin()) - 1;
    if (times[j] == t) return states[j];
    return hermite(*this, j, t);
}

StateTrajectory from_numeric(const numeric::Trajectory& traj) {
    StateTrajectory out;
    out.times = traj.times;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        out.states.emplace_back(traj.rho[j]);
        out.rates.emplace_back(traj.rho_rate[j]);
    }
    return out;
}

std::string to_string(Convention c) {
    switch (c) {
        case Convention::split: return "split";
        case Convention::window: return "window";
        case Convention::protocol: return "protocol";
    }
    return "split";
}

Convention convention_from_string(const std::string& name) {
    if (name == "split") return Convention::split;
    if (name == "window") return Convention::window;
    if (name == "protocol") return Convention::protocol;
    throw std::invalid_argument("unknown ledger convention '" + name + "' (split, window, protocol)");
}

Interval work_interval(const ProtocolSchedule& s, Convention c) {
    return c == Convention::protocol ? Interval{s.t_p, s.t_m} : Interval{s.t_i, s.t_f};
}

Interval energy_interval(const ProtocolSchedule& s, Convention c) {
    return c == Convention::window ? Interval{s.t_i, s.t_f} : Interval{s.t_p, s.t_m};
}

std::vector<double> sample_times(const ProtocolSchedule& s, double h) {
    s.validate();
    if (h <= 0.0) h = std::min(s.delta / 40.0, (s.t_m - s.t_p) / 800.0);
    const double reach = kWindowSupport * s.delta;
    std::vector<double> breaks = {s.t_p, s.t_i, s.t_f, s.t_m};
    for (double x : {s.t_i - reach, s.t_i + reach, s.t_f - reach, s.t_f + reach})
        if (x > s.t_p && x < s.t_m) breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> out = {breaks.front()};
    for (std::size_t k = 1; k < breaks.size(); ++k) {
        const double gap = breaks[k] - breaks[k - 1];
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / h - 1e-9)));
        for (std::size_t j = 1; j < pieces; ++j)
            out.push_back(breaks[k - 1] + gap * static_cast<double>(j) / static_cast<double>(pieces));
        out.push_back(breaks[k]);
    }
    return out;
}

StateTrajectory free_trajectory(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti,
                                const ProtocolSchedule& schedule, const std::vector<double>& times) {
    q.validate();
    schedule.validate();
    validate_density_matrix(rho_ti);
    if (times.empty()) throw std::invalid_argument("free_trajectory: no sample times");
    StateTrajectory out;
    out.times = times;
    Eigen::Matrix2cd u = numeric::system_propagator(q, schedule.t_i, times.front());
    Eigen::Matrix2cd rho = u * rho_ti * u.adjoint();
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (j > 0) {
            u = numeric::system_propagator(q, times[j - 1], times[j]);
            rho = u * rho * u.adjoint();
        }
        out.states.emplace_back(rho);
        out.rates.emplace_back(commutator_rate(qubit_hamiltonian(q, times[j]), rho));
    }
    return out;
}

StateTrajectory free_trajectory(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                                const ProtocolSchedule& schedule, const std::vector<double>& times) {
    validate_density_matrix(rho_ti);
    StateTrajectory out;
    out.times = times;
    for (double t : times) {
        Eigen::MatrixXcd rho = analytic::free_state(sys, rho_ti, schedule, t);
        out.rates.push_back(commutator_rate(sys.hamiltonian(t), rho));
        out.states.push_back(std::move(rho));
    }
    return out;
}

StateTrajectory measured_trajectory(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                                    const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                    const std::vector<double>& times) {
    a.validate();
    const auto n = static_cast<Eigen::Index>(sys.dimension());
    const double sx = a.sigma_x();
    StateTrajectory out = free_trajectory(sys, rho_ti, schedule, times);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        const double f = sampling_function_truncated(schedule, t);
        std::vector<double> c(static_cast<std::size_t>(n));
        std::vector<double> e(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            c[static_cast<std::size_t>(k)] = analytic::partial_work_center(sys, schedule, static_cast<std::size_t>(k), t);
            e[static_cast<std::size_t>(k)] = sys.energy(static_cast<std::size_t>(k), t);
        }
        Eigen::MatrixXcd& rho = out.states[j];
        Eigen::MatrixXcd& rate = out.rates[j];
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index s = 0; s < n; ++s) {
                if (r == s) continue;
                const double dc = a.lambda * (c[static_cast<std::size_t>(r)] - c[static_cast<std::size_t>(s)]);
                const double de = e[static_cast<std::size_t>(r)] - e[static_cast<std::size_t>(s)];
                rho(r, s) *= std::exp(-dc * dc / (4.0 * sx * sx));
                // d/dt of the damping exponent: -λ dc f (E_r - E_s) / (2σ_x²).
                rate(r, s) = rho(r, s) * cdouble(-a.lambda * dc * f * de / (2.0 * sx * sx), -de);
            }
        }
    }
    return out;
}

double work_integral(const StateTrajectory& traj, const HamiltonianModel& model, Interval iv, double tol) {
    check_interval(traj, iv, "work_integral");
    if (iv.a == iv.b) return 0.0;
    const double fine = gauss_legendre(traj, model, iv);
    const double estimate = std::abs(fine - gauss_legendre(coarsen(traj, iv), model, iv)) / 15.0;
    if (!(estimate <= tol)) {
        std::ostringstream os;
        os << "work_integral: trajectory too coarse over [" << iv.a << ", " << iv.b << "], error estimate "
           << estimate << " (requested " << tol << ")";
        throw numerical_error(os.str());
    }
    return fine;
}

double average_work_free(const SpectralSystem& sys, const Eigen::VectorXd& populations, Interval iv) {
    if (static_cast<std::size_t>(populations.size()) != sys.dimension())
        throw std::invalid_argument("average_work_free: population/dimension mismatch");
    if (iv.b == iv.a) return 0.0;
    auto integrand = [&](double t) {
        double s = 0.0;
        for (std::size_t n = 0; n < sys.dimension(); ++n)
            s += populations(static_cast<Eigen::Index>(n)) * sys.energy_rate(n, t);
        return s;
    };
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, iv.a, iv.b, 15, 1e-12, &error);
    if (!(error <= 1e-10)) {
        std::ostringstream os;
        os << "average_work_free: quadrature reached only " << error;
        throw numerical_error(os.str());
    }
    return value;
}

double average_work_free(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti, const ProtocolSchedule& schedule,
                         Interval iv) {
    if (iv.b == iv.a) return 0.0;
    const auto traj = free_trajectory(q, rho_ti, schedule, sample_times(schedule, kFreeStep));
    return work_integral(traj, model_of(q), iv, 1e-10);
}

double average_work_tilde(const StateTrajectory& measured, const HamiltonianModel& model, Interval iv, double tol) {
    if (iv.b == iv.a) return 0.0;
    return work_integral(measured, model, iv, tol);
}

double internal_energy_change(const StateTrajectory& traj, const HamiltonianModel& model, Interval iv) {
    check_interval(traj, iv, "internal_energy_change");
    const cdouble ua = (model.h(iv.a) * traj.state_at(iv.a)).trace();
    const cdouble ub = (model.h(iv.b) * traj.state_at(iv.b)).trace();
    return ub.real() - ua.real();
}

WorkHeatLedger build_ledger(const LedgerInputs& in) {
    const Interval wiv = work_interval(in.schedule, in.convention);
    const Interval eiv = energy_interval(in.schedule, in.convention);
    const std::array<std::pair<const Tagged*, Interval>, 4> checks = {
        {{&in.w_free, wiv}, {&in.w_tilde, wiv}, {&in.du, eiv}, {&in.du_tilde, eiv}}};
    for (const auto& [t, want] : checks) {
        if (!same_interval(t->iv, want)) {
            std::ostringstream os;
            os << "build_ledger: interval mismatch for the " << to_string(in.convention) << " convention, ["
               << t->iv.a << ", " << t->iv.b << "] where [" << want.a << ", " << want.b << "] is required";
            throw std::invalid_argument(os.str());
        }
    }
    WorkHeatLedger l;
    l.convention = in.convention;
    l.work_iv = wiv;
    l.energy_iv = eiv;
    l.w_free = in.w_free.value;
    l.w_tilde = in.w_tilde.value;
    l.w_dist = in.w_dist;
    l.du = in.du.value;
    l.du_tilde = in.du_tilde.value;
    l.q = l.du - l.w_free;
    l.q_tilde = l.du_tilde - l.w_tilde;
    l.dw_int = l.w_tilde - l.w_free;
    l.dw_povm = l.w_dist - l.w_free;
    l.dq_int = l.q_tilde - l.q;
    return l;
}

WorkHeatLedger spectral_ledger(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                               const ProtocolSchedule& schedule, const ApparatusSpec& a, Convention c) {
    const Interval wiv = work_interval(schedule, c);
    const Interval eiv = energy_interval(schedule, c);
    const auto times = sample_times(schedule);
    const auto model = model_of(sys);
    const auto free = free_trajectory(sys, rho_ti, schedule, times);
    const auto measured = measured_trajectory(sys, rho_ti, schedule, a, times);
    const Eigen::VectorXd pops = rho_ti.diagonal().real();
    LedgerInputs in;
    in.schedule = schedule;
    in.convention = c;
    in.w_free = {average_work_free(sys, pops, wiv), wiv};
    in.w_tilde = {average_work_tilde(measured, model, wiv), wiv};
    in.du = {internal_energy_change(free, model, eiv), eiv};
    in.du_tilde = {internal_energy_change(measured, model, eiv), eiv};
    in.w_dist = analytic::average_work_dist(sys, std::vector<double>(pops.data(), pops.data() + pops.size()),
                                            schedule);
    return build_ledger(in);
}

WorkHeatLedger qubit_ledger(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti, const ProtocolSchedule& schedule,
                            const numeric::QubitRun& run, Convention c) {
    const Interval wiv = work_interval(schedule, c);
    const Interval eiv = energy_interval(schedule, c);
    const auto model = model_of(q);
    const auto measured = from_numeric(run.trajectory);
    const auto free = free_trajectory(q, rho_ti, schedule, sample_times(schedule, kFreeStep));
    LedgerInputs in;
    in.schedule = schedule;
    in.convention = c;
    in.w_free = {work_integral(free, model, wiv, 1e-10), wiv};
    in.w_tilde = {average_work_tilde(measured, model, wiv), wiv};
    in.du = {internal_energy_change(free, model, eiv), eiv};
    in.du_tilde = {internal_energy_change(measured, model, eiv), eiv};
    in.w_dist = run.distribution.mean();
    return build_ledger(in);
}

}  // namespace qwork::thermo
