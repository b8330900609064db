// numeric.hpp: momentum-grid integration of the driven two-level atom
// coupled to the pointer:
//
//   i ∂_t c_j(t,p) = p²/(2m) c_j + [1 + λ f(t) p] Σ_k H_jk(t) c_k
//
// Each momentum point is an independent 2-component linear ODE. The common
// p²/2m phase is carried analytically by ψ_A(p, t); the solver only sees
//   i ∂_t d = [1 + λ f(t) p] H_S(t) d,   c(t,p) = ψ_A(p, t) d(t, p),
// and outside the coupling windows every point shares the system-only
// propagator, which is computed once.

#pragma once

#include "qwork/core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace qwork::numeric {

// Uniform symmetric grid p_k ∈ [-p_max, p_max].
struct MomentumGrid {
    std::vector<double> p;
    double dp{0.0};
    double p_max{0.0};

    static MomentumGrid uniform(std::size_t n, double p_max);
    std::size_t size() const { return p.size(); }
    // p_max ≥ 6σ_p and dp ≤ π/(|λ| W_max) so e^{iλWp} stays resolved.
    void validate(const ApparatusSpec& a, double w_max_target) const;
};

// 4096 points spanning ±8σ_p.
MomentumGrid default_grid(const ApparatusSpec& a, std::size_t n = 4096, double extent = 8.0);
// Twice the extent at half the spacing.
MomentumGrid refine(const MomentumGrid& grid);

struct CoefficientField {
    double time{0.0};
    MomentumGrid grid;
    std::vector<Eigen::Vector2cd> c;  // (c_0, c_1) at each p_k

    // Σ_k Σ_n |c_n(p_k)|² dp.
    double norm() const;
};

struct SolverOptions {
    double rtol{1e-10};
    double atol{1e-12};
    // Spacing of reduced-state samples; 0 picks min(Δ/40, span/800).
    double sample_step{0.0};
    // Points whose initial pointer amplitude is below this fraction of the
    // peak only see the system-only propagator; their weight is < cutoff².
    double amplitude_cutoff{1e-30};
    unsigned threads{1};
    std::size_t max_steps_per_sample{200000};
};

struct Trajectory {
    // At least t_i ± 6Δ, t_f ± 6Δ (when inside the run) and both ends.
    std::vector<CoefficientField> checkpoints;
    // Reduced system state ρ̃_S and dρ̃_S/dt on a dense time grid.
    std::vector<double> times;
    std::vector<Eigen::Matrix2cd> rho;
    std::vector<Eigen::Matrix2cd> rho_rate;
    double norm_drift{0.0};        // |norm(t_end) - norm(t_start)|
    double max_point_drift{0.0};   // max_k | |d_k(t_end)|² - |d_k(t_start)|² |
    std::size_t steps{0};          // accepted RK steps over all points

    const CoefficientField& final_field() const { return checkpoints.back(); }
};

// Time-ordered exp(-i ∫_{from}^{to} H_S dt); `to` may precede `from`.
Eigen::Matrix2cd system_propagator(const DrivenQubit& q, double from, double to, double rtol = 1e-13);

// c_n(t_p, p) = ψ_S,n(t_p) ψ_A(p, t_p), with ψ_S(t_p) chosen so free
// evolution reaches `target` at t_i.
CoefficientField prepare_initial_coefficients(const DrivenQubit& q, const Eigen::Vector2cd& target,
                                              const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                              const MomentumGrid& grid);

Trajectory evolve_coefficients(const CoefficientField& field, const DrivenQubit& q,
                               const ProtocolSchedule& schedule, const ApparatusSpec& a, double t_end,
                               const SolverOptions& options = {});

// P(W,t) = |λ|/(2π) Σ_n |Σ_k dp c_n(p_k) e^{iλWp_k}|².
WorkDistribution work_distribution_numeric(const CoefficientField& field, const ApparatusSpec& a,
                                           const std::vector<double>& work_grid);

Eigen::Matrix2cd reduced_system_state_numeric(const CoefficientField& field);

struct QubitRun {
    WorkDistribution distribution;
    Trajectory trajectory;  // for mixtures, ρ̃ is the weighted sum; fields are the first component's
};

// Convex mixture of pure targets at t_i. Every pipeline stage is linear in ρ_S,
// so the result is the weighted sum of pure runs.
QubitRun mixed_state_run(const DrivenQubit& q, const std::vector<std::pair<double, Eigen::Vector2cd>>& components,
                         const ProtocolSchedule& schedule, const ApparatusSpec& a, const MomentumGrid& grid,
                         const std::vector<double>& work_grid, const SolverOptions& options = {});

WorkDistribution mixed_state_distribution(const DrivenQubit& q,
                                          const std::vector<std::pair<double, Eigen::Vector2cd>>& components,
                                          const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                          const MomentumGrid& grid, const std::vector<double>& work_grid,
                                          const SolverOptions& options = {});

// Full run to t_m for any target state at t_i.
QubitRun run_qubit(const DrivenQubit& q, const SystemState& target, const ProtocolSchedule& schedule,
                   const ApparatusSpec& a, const MomentumGrid& grid, const std::vector<double>& work_grid,
                   const SolverOptions& options = {});

// Possible energy-exchange values E_n(t_f) - E_m(t_i) = ±κ²t_f ∓ ±κ²t_i.
std::vector<double> qubit_mode_centers(const DrivenQubit& q, const ProtocolSchedule& schedule);

// Uniform work grid over the qubit's modes ± 8Σ(t_m).
std::vector<double> qubit_work_grid(const DrivenQubit& q, const ProtocolSchedule& schedule,
                                    const ApparatusSpec& a, std::size_t n = 4096);

}  // namespace qwork::numeric
