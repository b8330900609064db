// oracle.hpp: independent references for the engines: the two-point
// measurement (TMP) distribution, POVM effect reconstruction for the qubit,
// brute-force quadrature of distributions and ideal-limit ladders.

#pragma once

#include "qwork/core.hpp"
#include "qwork/numeric.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace qwork::oracle {

struct Atom {
    double work;
    double weight;
};

struct DiscreteWorkDistribution {
    std::vector<Atom> atoms;  // sorted by work, coincident atoms merged

    void validate(double tol = 1e-12) const;
    double total() const;
    double mean() const;
    // Weight of the atom at w (0 when absent).
    double weight_at(double w, double tol = 1e-9) const;
};

// Time-ordered propagator of the qubit by fixed-step fourth-order Magnus
// with `steps` steps (0 picks 1000 per unit time). Independent of the
// engines' adaptive Runge–Kutta.
Eigen::Matrix2cd magnus_propagator(const DrivenQubit& q, double from, double to, std::size_t steps = 0);

// P_{m→n} = |⟨E_n(t_f)|U_S|E_m(t_i)⟩|², rows m, columns n, levels in
// ascending energy.
Eigen::Matrix2d transition_matrix(const DrivenQubit& q, const ProtocolSchedule& schedule);

// Eigenvectors of H_S(t) in ascending energy (columns).
Eigen::Matrix2cd instantaneous_basis(const DrivenQubit& q, double t);

DiscreteWorkDistribution two_point_distribution(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti,
                                                const ProtocolSchedule& schedule);
DiscreteWorkDistribution two_point_distribution(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                                                const ProtocolSchedule& schedule);

// E(W_k) for the qubit, reconstructed from runs on |0⟩, |1⟩, |+⟩, |+i⟩ at t_i.
struct PovmEffects {
    std::vector<double> work;
    std::vector<Eigen::Matrix2cd> effects;

    // Trapezoid integral of every entry.
    Eigen::Matrix2cd completeness() const;
    double min_eigenvalue() const;
    // tr[E(W_k) ρ].
    std::vector<double> probability(const Eigen::Matrix2cd& rho) const;
};

PovmEffects povm_effects_qubit(const DrivenQubit& q, const ProtocolSchedule& schedule, const ApparatusSpec& a,
                               const numeric::MomentumGrid& grid, const std::vector<double>& work_grid,
                               const numeric::SolverOptions& options = {});

enum class Weight { work, boltzmann };

struct Expectation {
    double value;   // Richardson-extrapolated (Simpson) value
    double error;   // |T_h - T_2h|
    double mass;    // ∫ P dW on the grid
};

// ∫ P(W) w(W) dW with w = W or e^{-βW}. Throws numerical_error when the grid
// mass leaves 1 ± coverage.
Expectation quadrature_expectation(const WorkDistribution& dist, Weight weight, double beta = 0.0,
                                   double coverage = 1e-6);

// Mass of the density in windows of half-width `half_width` around each
// atom position, clipped at midpoints between neighbouring positions.
std::vector<double> peak_weights(const WorkDistribution& dist, const std::vector<double>& positions,
                                 double half_width);

// max_j |peak weight_j - atom weight_j| with windows of half-width 4Σ.
double atom_weight_distance(const WorkDistribution& dist, const DiscreteWorkDistribution& tmp, double sigma);

// One rung of an ideal-limit ladder: Δ = Δ₀ε, σ_p = σ_p₀/ε, m = m₀/ε³, so
// that Δ, 1/σ_p and σ_p t/m all shrink geometrically.
struct Rung {
    double scale;
    ProtocolSchedule schedule;
    ApparatusSpec apparatus;
};

struct LadderSpec {
    ProtocolSchedule schedule;
    ApparatusSpec apparatus;
    std::vector<double> scales{1.0, 0.5, 0.25};

    std::vector<Rung> rungs() const;
};

struct ConvergenceReport {
    std::vector<double> scales;
    std::vector<double> distances;
    bool monotone{false};  // strictly decreasing
    double final_distance() const { return distances.empty() ? 0.0 : distances.back(); }
};

ConvergenceReport ideal_limit_sweep(const std::function<double(const Rung&)>& distance, const LadderSpec& spec);

}  // namespace qwork::oracle
