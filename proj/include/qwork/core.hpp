// core.hpp: domain types shared by the analytic and numeric engines:
// protocol schedules, the apparatus model, system descriptions, states and
// sampled work distributions, plus the window/sampling functions and the
// apparatus dispersion width.
//
// Units: κ = 1 throughout. Times are in 1/κ, energies in κ, momenta in σ_p
// units, and the measured work is W = x/λ.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qwork {

using cdouble = std::complex<double>;

// A run or quadrature missed its requested tolerance.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Half-width of a sampling window's support in time integrations, in units
// of Δ. exp(-36) is below double precision relative to the window peak.
inline constexpr double kWindowSupport = 6.0;

// ------------------------------ Schedule ------------------------------------

// Preparation, first and second coupling, and final read-out times, plus the
// width Δ of the Gaussian coupling windows. t_i == t_f is allowed: both
// windows cancel and the protocol measures nothing.
struct ProtocolSchedule {
    double t_p{0.0};
    double t_i{2.0};
    double t_f{3.0};
    double t_m{4.0};
    double delta{0.2};

    void validate() const;

    // The two windows are effectively disjoint once their centers are more
    // than one support half-width apart.
    bool windows_disjoint() const { return (t_f - t_i) > kWindowSupport * delta; }
    bool degenerate() const { return t_i == t_f; }
};

// g(t) = exp(-t²/Δ²) / (√π Δ).
double window_value(const ProtocolSchedule& schedule, double t);

// f(t) = g(t - t_f) - g(t - t_i), evaluated without truncation.
double sampling_function(const ProtocolSchedule& schedule, double t);

// f(t) with each window cut to [center - 6Δ, center + 6Δ]; this is the form
// used inside time integrations.
double sampling_function_truncated(const ProtocolSchedule& schedule, double t);

// Union of the two truncated window supports clipped to [t_p, t_m], as a
// sorted list of disjoint intervals.
std::vector<std::pair<double, double>> active_intervals(const ProtocolSchedule& schedule);

// ------------------------------ Apparatus -----------------------------------

// Free pointer particle of mass m, prepared as a Gaussian of momentum width
// σ_p (position width σ_x = 1/σ_p), coupled with strength λ.
struct ApparatusSpec {
    double mass{1000.0};
    double sigma_p{1.0};
    double lambda{1.0};

    void validate() const;
    double sigma_x() const { return 1.0 / sigma_p; }
};

// ψ_A(p, t) = (√π σ_p)^(-1/2) exp(-(1/σ_p² + i(t - t_p)/m) p²/2).
cdouble apparatus_momentum_amplitude(const ApparatusSpec& a, double p, double t, double t_p);

// Σ(t) = (1/σ_p² + σ_p²(t - t_p)²/m²)^(1/2) / |λ|. Each Gaussian in a
// measured work distribution is exp(-(W - c)²/Σ²)/(√π Σ).
double sigma_width(const ApparatusSpec& a, double t, double t_p);

// ------------------------------ Systems -------------------------------------

// Self-commuting Hamiltonian given by its eigenvalue trajectories on a fixed
// basis. Each level carries E_n(t) and, when known, dE_n/dt.
class SpectralSystem {
public:
    using Trajectory = std::function<double(double)>;

    SpectralSystem() = default;
    explicit SpectralSystem(std::vector<Trajectory> energies, std::vector<Trajectory> rates = {});

    // E_n(t) = Σ_k coeffs[n][k] t^k.
    static SpectralSystem polynomial(std::vector<std::vector<double>> coeffs);

    std::size_t dimension() const { return energies_.size(); }
    double energy(std::size_t n, double t) const;
    // Analytic when a rate was supplied, otherwise a five-point central
    // difference.
    double energy_rate(std::size_t n, double t) const;

    Eigen::MatrixXcd hamiltonian(double t) const;
    Eigen::MatrixXcd hamiltonian_rate(double t) const;

    // Polynomial coefficients, when built through polynomial(); used for
    // serialisation.
    const std::vector<std::vector<double>>& coefficients() const { return coeffs_; }

    // Throws std::invalid_argument when any trajectory is non-finite on the
    // schedule's span.
    void validate(const ProtocolSchedule& schedule) const;

private:
    std::vector<Trajectory> energies_;
    std::vector<Trajectory> rates_;
    std::vector<std::vector<double>> coeffs_;
};

// Two-level atom in a field B(t) = γt rotating about z at polar angle θ:
//   H_S(t) = κ² t [cos ωt sin θ σ_x + sin ωt sin θ σ_y + cos θ σ_z].
struct DrivenQubit {
    double kappa{1.0};
    double omega{1.0};
    double theta{0.0};

    void validate() const;
    bool self_commuting() const;
};

Eigen::Matrix2cd qubit_hamiltonian(const DrivenQubit& q, double t);
Eigen::Matrix2cd qubit_hamiltonian_rate(const DrivenQubit& q, double t);

// ------------------------------ States --------------------------------------

class SystemState {
public:
    static SystemState pure(Eigen::VectorXcd amplitudes);
    static SystemState mixed(Eigen::MatrixXcd rho);
    // Two-level pure state α|0⟩ + β|1⟩.
    static SystemState qubit(cdouble alpha, cdouble beta);

    bool is_pure() const { return pure_; }
    Eigen::Index dimension() const { return rho_.rows(); }
    // Only meaningful for pure states.
    const Eigen::VectorXcd& amplitudes() const;
    const Eigen::MatrixXcd& density() const { return rho_; }
    Eigen::VectorXd populations() const { return rho_.diagonal().real(); }

    // Convex decomposition into pure states (eigen-decomposition for mixed
    // inputs). Components with weight below 1e-15 are dropped.
    std::vector<std::pair<double, Eigen::VectorXcd>> pure_components() const;

private:
    SystemState() = default;
    bool pure_{false};
    Eigen::VectorXcd psi_;
    Eigen::MatrixXcd rho_;
};

// Checks Hermiticity, unit trace and positivity within tol.
void validate_density_matrix(const Eigen::MatrixXcd& rho, double tol = 1e-10);

// ------------------------------ Distributions -------------------------------

struct WorkDistribution {
    std::vector<double> work;
    std::vector<double> density;
    double time{0.0};
    std::string engine;
    std::map<std::string, double> parameters;
    std::vector<std::string> warnings;

    // Trapezoid rule over the work grid.
    double integral() const;
    double mean() const;
    // Throws numerical_error when a density is negative or the integral
    // leaves [1 - coverage, 1 + coverage].
    void check(double coverage) const;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

// Uniform grid over [min center - 8Σ, max center + 8Σ].
std::vector<double> default_work_grid(const std::vector<double>& centers, double sigma,
                                      std::size_t n = 4096);

// Compensated (Neumaier) summation with a fixed order.
class KahanSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

}  // namespace qwork
