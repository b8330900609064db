// thermo.hpp: first-law bookkeeping for free and measured evolutions.
//
// Work integrals ∫ tr[Ḣ_S ρ] dt, internal-energy changes and heats are
// evaluated on an explicit time interval. Work integrals may run over the
// coupling window [t_i, t_f] or the full protocol [t_p, t_m], and so may the
// internal-energy changes entering the heats. A convention fixes both.

#pragma once

#include "qwork/core.hpp"
#include "qwork/numeric.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace qwork::thermo {

struct HamiltonianModel {
    std::function<Eigen::MatrixXcd(double)> h;
    std::function<Eigen::MatrixXcd(double)> h_rate;
};

HamiltonianModel model_of(const DrivenQubit& q);
HamiltonianModel model_of(const SpectralSystem& sys);

// Sampled density matrices and their time derivatives. Between samples the
// state is a cubic Hermite interpolant.
struct StateTrajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;
    std::vector<Eigen::MatrixXcd> rates;

    void validate() const;
    Eigen::MatrixXcd state_at(double t) const;
};

StateTrajectory from_numeric(const numeric::Trajectory& traj);

// split:    work over [t_i, t_f], ΔU over [t_p, t_m]
// window:   everything over [t_i, t_f]
// protocol: everything over [t_p, t_m]
enum class Convention { split, window, protocol };
std::string to_string(Convention c);
Convention convention_from_string(const std::string& name);

struct Interval {
    double a{0.0};
    double b{0.0};
};
Interval work_interval(const ProtocolSchedule& s, Convention c);
Interval energy_interval(const ProtocolSchedule& s, Convention c);

// Sample times over [t_p, t_m] that contain t_i and t_f, spaced ≤ h
// (0 picks min(Δ/40, (t_m - t_p)/800)).
std::vector<double> sample_times(const ProtocolSchedule& s, double h = 0.0);

// Free evolution ρ_S(t) = U(t, t_i) ρ_S(t_i) U†(t, t_i) sampled at `times`.
StateTrajectory free_trajectory(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti,
                                const ProtocolSchedule& schedule, const std::vector<double>& times);
StateTrajectory free_trajectory(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                                const ProtocolSchedule& schedule, const std::vector<double>& times);

// Measured reduced state ρ̃_S(t) of a self-commuting system: the free state
// with coherences damped by exp(-(λ ∫_{t_p}^{t} f (E_n - E_m))²/(4σ_x²)).
StateTrajectory measured_trajectory(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                                    const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                    const std::vector<double>& times);

// ∫_a^b tr[Ḣ_S ρ] dt: 4-point Gauss–Legendre per sample interval on the
// Hermite interpolant. The same rule on every other sample gives an error
// estimate; numerical_error when it exceeds `tol`.
double work_integral(const StateTrajectory& traj, const HamiltonianModel& model, Interval iv, double tol = 1e-7);

// ⟨W⟩_S over [a, b]: Σ_n ρ_nn ∫ Ė_n by Gauss–Kronrod for spectral systems,
// a system-only solve for the qubit.
double average_work_free(const SpectralSystem& sys, const Eigen::VectorXd& populations, Interval iv);
double average_work_free(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti, const ProtocolSchedule& schedule,
                         Interval iv);

// ⟨W̃⟩_S over [a, b] from the measured trajectory.
double average_work_tilde(const StateTrajectory& measured, const HamiltonianModel& model, Interval iv,
                          double tol = 1e-7);

// tr[H_S(b) ρ(b)] - tr[H_S(a) ρ(a)].
double internal_energy_change(const StateTrajectory& traj, const HamiltonianModel& model, Interval iv);

// One ingredient of a ledger together with the interval it was computed on.
struct Tagged {
    double value{0.0};
    Interval iv;
};

struct LedgerInputs {
    ProtocolSchedule schedule;
    Convention convention{Convention::split};
    Tagged w_free;
    Tagged w_tilde;
    Tagged du;
    Tagged du_tilde;
    double w_dist{0.0};
};

struct WorkHeatLedger {
    Convention convention{Convention::split};
    Interval work_iv;
    Interval energy_iv;
    double w_free{0.0};
    double w_tilde{0.0};
    double w_dist{0.0};
    double du{0.0};
    double du_tilde{0.0};
    double q{0.0};
    double q_tilde{0.0};
    double dw_int{0.0};
    double dw_povm{0.0};
    double dq_int{0.0};
};

// Throws std::invalid_argument when an ingredient's interval differs from the
// one the convention prescribes for it.
WorkHeatLedger build_ledger(const LedgerInputs& in);

// Ledgers from complete engine outputs, one per convention.
WorkHeatLedger spectral_ledger(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                               const ProtocolSchedule& schedule, const ApparatusSpec& a, Convention c);
WorkHeatLedger qubit_ledger(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti, const ProtocolSchedule& schedule,
                            const numeric::QubitRun& run, Convention c);

}  // namespace qwork::thermo
