// analytic.hpp: closed-form work statistics for self-commuting Hamiltonians.
//
// For H_S(t) = Σ_n E_n(t)|n⟩⟨n| the measured distribution is a Gaussian
// mixture: one Gaussian per level, centred on c_n = ∫ f(t) E_n(t) dt over
// [t_p, t_m], of common width Σ(t), weighted by the level populations.

#pragma once

#include "qwork/core.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace qwork::analytic {

struct ThermalSpec {
    double beta{1.0};  // β = 0 gives uniform weights
    void validate() const;
};

// Forward distribution evaluated at time t; the backward one at the mirrored
// time t_p + t_m - t.
struct CrooksPair {
    ProtocolSchedule schedule;
    double t{0.0};
    void validate() const;
    double backward_time() const { return schedule.t_p + schedule.t_m - t; }
};

// ∫_{t_p}^{t_m} f(t) E_n(t) dt by adaptive Gauss–Kronrod quadrature over the
// two window supports (absolute tolerance 1e-10).
double work_center(const SpectralSystem& sys, const ProtocolSchedule& schedule, std::size_t n);
std::vector<double> work_centers(const SpectralSystem& sys, const ProtocolSchedule& schedule);
// ∫_{t_p}^{t} f(t') E_n(t') dt'.
double partial_work_center(const SpectralSystem& sys, const ProtocolSchedule& schedule, std::size_t n, double t);

// Gaussian mixture Σ_n w_n exp(-(W - c_n)²/Σ²)/(√π Σ) at one work value.
double mixture_density(const std::vector<double>& weights, const std::vector<double>& centers,
                       double sigma, double w);

WorkDistribution work_distribution(const SpectralSystem& sys, const std::vector<double>& populations,
                                   const ProtocolSchedule& schedule, const ApparatusSpec& a, double t,
                                   const std::vector<double>& work_grid);

double average_work_dist(const SpectralSystem& sys, const std::vector<double>& populations,
                         const ProtocolSchedule& schedule);

// Normalised Gibbs weights exp(-β E_n(t))/Z(t), computed in the log domain.
std::vector<double> gibbs_weights(const SpectralSystem& sys, const ThermalSpec& th, double t);
double log_partition_function(const SpectralSystem& sys, const ThermalSpec& th, double t);
double partition_function(const SpectralSystem& sys, const ThermalSpec& th, double t);
// ΔF = -(1/β) ln(Z(t_f)/Z(t_i)); at β = 0 the limit (mean level shift).
double free_energy_change(const SpectralSystem& sys, const ThermalSpec& th,
                          const ProtocolSchedule& schedule);

WorkDistribution thermal_work_distribution(const SpectralSystem& sys, const ThermalSpec& th,
                                           const ProtocolSchedule& schedule, const ApparatusSpec& a,
                                           double t, const std::vector<double>& work_grid);

// P_F(W, t) / P_B(-W, t_m - t) from the closed-form ratio
//   Σ(t_B) Z(t_f) / (Σ(t) Z(t_i)) · Σ_n e^{-βE_n(t_i)} e^{-(W - c_n)²/Σ(t)²}
//                                 / Σ_n e^{-βE_n(t_f)} e^{-(W - c_n)²/Σ(t_B)²}.
// Throws numerical_error when the denominator underflows.
double crooks_ratio(const SpectralSystem& sys, const ThermalSpec& th, const CrooksPair& pair,
                    const ApparatusSpec& a, double w);

// ⟨e^{-βW}⟩_dist = e^{β²Σ²(t_m)/4}/Z(t_i) Σ_n e^{-β(E_n(t_i) + c_n)}.
double modified_jarzynski(const SpectralSystem& sys, const ThermalSpec& th,
                          const ProtocolSchedule& schedule, const ApparatusSpec& a);
double log_modified_jarzynski(const SpectralSystem& sys, const ThermalSpec& th,
                              const ProtocolSchedule& schedule, const ApparatusSpec& a);

struct SecondLawBound {
    double lhs;          // thermal ⟨W⟩_dist
    double rhs;          // -(1/β) ln(Σ_n e^{-β(E_n(t_i) + c_n)}/Z(t_i)) - βΣ²(t_m)/4
    double correction;   // the -βΣ²(t_m)/4 term alone
    bool holds(double slack = 1e-10) const { return lhs - rhs >= -slack; }
};
SecondLawBound second_law_bound(const SpectralSystem& sys, const ThermalSpec& th,
                                const ProtocolSchedule& schedule, const ApparatusSpec& a);

// Multiplies ρ_nm by exp(-(λ ∫_{t_p}^{t} f (E_n - E_m))²/(4σ_x²)). For t past
// both windows this is the full-protocol decoherence factor.
Eigen::MatrixXcd reduced_system_state(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_full,
                                      const ProtocolSchedule& schedule, const ApparatusSpec& a, double t);

// Σ_n p_n (c_n - [E_n(t_f) - E_n(t_i)]).
double delta_w_povm(const SpectralSystem& sys, const std::vector<double>& populations,
                    const ProtocolSchedule& schedule);

// Free evolution in the fixed basis: ρ_nm(t) = ρ_nm(t_i) e^{-i∫_{t_i}^{t}(E_n - E_m)}.
Eigen::MatrixXcd free_state(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                            const ProtocolSchedule& schedule, double t);

}  // namespace qwork::analytic
