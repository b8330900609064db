#include "oracles.hpp"
#include "qwork/analytic.hpp"
#include "qwork/numeric.hpp"
#include "qwork/thermo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qwork;
using namespace qwork::thermo;
namespace to = testing_oracles;

namespace {

const ProtocolSchedule kFigure{0.0, 2.0, 3.0, 4.0, 0.2};
const ApparatusSpec kApparatus{1000.0, 1.0, 1.0};
const SpectralSystem kLinear = SpectralSystem::polynomial({{0.0, 1.0}, {0.0, -1.0}});
const double kR = 1.0 / std::sqrt(2.0);

Eigen::Matrix2cd projector(cdouble a, cdouble b) {
    Eigen::Vector2cd v(a, b);
    return v * v.adjoint();
}

numeric::QubitRun qubit_run(const DrivenQubit& q, const SystemState& s, std::size_t points = 1024) {
    return numeric::run_qubit(q, s, kFigure, kApparatus, numeric::default_grid(kApparatus, points),
                              numeric::qubit_work_grid(q, kFigure, kApparatus, 2049));
}

}  // namespace

TEST(Conventions, NamesAndIntervals) {
    for (auto c : {Convention::split, Convention::window, Convention::protocol})
        EXPECT_EQ(convention_from_string(to_string(c)), c);
    EXPECT_THROW(convention_from_string("both"), std::invalid_argument);
    EXPECT_DOUBLE_EQ(work_interval(kFigure, Convention::split).a, 2.0);
    EXPECT_DOUBLE_EQ(energy_interval(kFigure, Convention::split).b, 4.0);
    EXPECT_DOUBLE_EQ(energy_interval(kFigure, Convention::window).a, 2.0);
    EXPECT_DOUBLE_EQ(work_interval(kFigure, Convention::protocol).a, 0.0);
}

TEST(SampleTimes, ContainKeyTimes) {
    const auto t = sample_times(kFigure);
    EXPECT_DOUBLE_EQ(t.front(), 0.0);
    EXPECT_DOUBLE_EQ(t.back(), 4.0);
    EXPECT_NE(std::find(t.begin(), t.end(), 2.0), t.end());
    EXPECT_NE(std::find(t.begin(), t.end(), 3.0), t.end());
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LE(t[k] - t[k - 1], 0.01 + 1e-12);
}

TEST(FreeWork, SpectralEqualsLevelShift) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const auto spec = to::random_spectrum(rng);
        const auto sys = SpectralSystem::polynomial(spec.coeffs);
        Eigen::VectorXd p = Eigen::VectorXd::Random(static_cast<Eigen::Index>(sys.dimension())).cwiseAbs();
        p /= p.sum();
        double expect = 0.0;
        for (std::size_t n = 0; n < sys.dimension(); ++n)
            expect += p(static_cast<Eigen::Index>(n)) *
                      (to::polynomial_value(spec.coeffs[n], 3.0) - to::polynomial_value(spec.coeffs[n], 2.0));
        EXPECT_NEAR(average_work_free(sys, p, {2.0, 3.0}), expect, 1e-10);
    }
    EXPECT_EQ(average_work_free(kLinear, Eigen::Vector2d(0.5, 0.5), {2.0, 2.0}), 0.0);
}

TEST(FreeWork, QubitEigenRamp) {
    const DrivenQubit q{1.0, 1.0, 0.0};
    EXPECT_NEAR(average_work_free(q, projector(1.0, 0.0), kFigure, {2.0, 3.0}), 1.0, 1e-9);
    EXPECT_NEAR(average_work_free(q, projector(0.0, 1.0), kFigure, {2.0, 3.0}), -1.0, 1e-9);
}

TEST(FreeWork, FirstLawOfClosedEvolution) {
    const DrivenQubit q{1.0, 1.0, 1.1};
    const auto traj = free_trajectory(q, projector(0.6, 0.8), kFigure, sample_times(kFigure, 2.5e-3));
    const auto model = model_of(q);
    for (Interval iv : {Interval{2.0, 3.0}, Interval{0.0, 4.0}})
        EXPECT_NEAR(internal_energy_change(traj, model, iv), work_integral(traj, model, iv, 1e-10), 1e-8);
}

TEST(InternalEnergy, Examples) {
    const auto constant = SpectralSystem::polynomial({{1.0}, {-1.0}});
    Eigen::MatrixXcd e0 = Eigen::MatrixXcd::Zero(2, 2);
    e0(0, 0) = 1.0;
    const auto times = sample_times(kFigure);
    const auto traj = free_trajectory(constant, e0, kFigure, times);
    EXPECT_NEAR(internal_energy_change(traj, model_of(constant), {0.0, 4.0}), 0.0, 1e-15);

    const DrivenQubit q{1.0, 1.0, 0.0};
    const auto qt = free_trajectory(q, projector(1.0, 0.0), kFigure, times);
    EXPECT_NEAR(internal_energy_change(qt, model_of(q), {2.0, 3.0}), 1.0, 1e-9);
}

TEST(Trajectory, ValidationAndInterpolation) {
    StateTrajectory bad;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    const DrivenQubit q{1.0, 1.0, 0.7};
    const auto coarse = free_trajectory(q, projector(kR, kR), kFigure, sample_times(kFigure, 0.01));
    const auto fine = free_trajectory(q, projector(kR, kR), kFigure, {2.345});
    EXPECT_LT((coarse.state_at(2.345) - fine.states[0]).norm(), 1e-8);
    const auto sparse = free_trajectory(q, projector(kR, kR), kFigure, sample_times(kFigure, 0.5));
    EXPECT_THROW(work_integral(sparse, model_of(q), {2.0, 3.0}, 1e-10), numerical_error);
}

TEST(MeasuredWork, SelfCommutingEqualsFree) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        const auto sys = SpectralSystem::polynomial(to::random_spectrum(rng).coeffs);
        const auto rho = to::random_density(rng, static_cast<Eigen::Index>(sys.dimension()));
        const auto times = sample_times(kFigure);
        const auto measured = measured_trajectory(sys, rho, kFigure, kApparatus, times);
        const auto free = free_trajectory(sys, rho, kFigure, times);
        for (Interval iv : {Interval{2.0, 3.0}, Interval{0.0, 4.0}})
            EXPECT_NEAR(average_work_tilde(measured, model_of(sys), iv),
                        average_work_free(sys, rho.diagonal().real(), iv), 1e-8);
        // Coherences decay to the Appendix value once both windows have acted.
        const auto expect = analytic::reduced_system_state(sys, analytic::free_state(sys, rho, kFigure, 4.0), kFigure,
                                                           kApparatus, 4.0);
        EXPECT_LT((measured.states.back() - expect).norm(), 1e-10);
        (void)free;
    }
}

TEST(MeasuredWork, CommutingQubitRunMatchesFree) {
    const DrivenQubit q{1.0, 1.0, 0.0};
    const auto r = qubit_run(q, SystemState::qubit(0.6, 0.8));
    const auto tilde = average_work_tilde(from_numeric(r.trajectory), model_of(q), {2.0, 3.0});
    EXPECT_NEAR(tilde, average_work_free(q, projector(0.6, 0.8), kFigure, {2.0, 3.0}), 1e-6);
    EXPECT_NEAR(tilde, 0.36 - 0.64, 1e-6);
}

TEST(MeasuredWork, UncoupledRunMatchesFree) {
    const ProtocolSchedule off{0.0, 2.0, 2.0, 4.0, 0.2};
    const DrivenQubit q{1.0, 1.0, 1.0};
    const auto r = numeric::run_qubit(q, SystemState::qubit(0.6, 0.8), off, kApparatus,
                                      numeric::default_grid(kApparatus, 512),
                                      numeric::qubit_work_grid(q, off, kApparatus, 1025));
    const double tilde = average_work_tilde(from_numeric(r.trajectory), model_of(q), {0.0, 4.0});
    EXPECT_NEAR(tilde, average_work_free(q, projector(0.6, 0.8), off, {0.0, 4.0}), 1e-7);
}

TEST(Ledger, IdentitiesAndIntervalChecks) {
    LedgerInputs in;
    in.schedule = kFigure;
    in.convention = Convention::split;
    in.w_free = {0.7, {2.0, 3.0}};
    in.w_tilde = {0.4, {2.0, 3.0}};
    in.du = {1.1, {0.0, 4.0}};
    in.du_tilde = {0.3, {0.0, 4.0}};
    in.w_dist = 0.9;
    const auto l = build_ledger(in);
    EXPECT_NEAR(l.q, l.du - l.w_free, 1e-12);
    EXPECT_NEAR(l.q_tilde, l.du_tilde - l.w_tilde, 1e-12);
    EXPECT_NEAR(l.dw_int, l.w_tilde - l.w_free, 1e-12);
    EXPECT_NEAR(l.dw_povm, l.w_dist - l.w_free, 1e-12);
    EXPECT_NEAR(l.dq_int, l.q_tilde - l.q, 1e-12);
    EXPECT_NEAR(l.du_tilde - l.du, l.dw_int + l.dq_int, 1e-12);

    in.du = {1.1, {2.0, 3.0}};
    EXPECT_THROW(build_ledger(in), std::invalid_argument);
    in.convention = Convention::window;
    in.du_tilde = {0.3, {2.0, 3.0}};
    EXPECT_NO_THROW(build_ledger(in));
    in.convention = Convention::protocol;
    EXPECT_THROW(build_ledger(in), std::invalid_argument);
}

TEST(Ledger, SelfCommutingNull) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 3; ++trial) {
        const auto sys = SpectralSystem::polynomial(to::random_spectrum(rng).coeffs);
        const auto rho = to::random_density(rng, static_cast<Eigen::Index>(sys.dimension()));
        std::vector<double> pops;
        for (Eigen::Index n = 0; n < rho.rows(); ++n) pops.push_back(rho(n, n).real());
        for (auto c : {Convention::split, Convention::window, Convention::protocol}) {
            const auto l = spectral_ledger(sys, rho, kFigure, kApparatus, c);
            EXPECT_NEAR(l.dw_int, 0.0, 1e-8);
            EXPECT_NEAR(l.dq_int, 0.0, 1e-8);
            if (c == Convention::split) {
                EXPECT_NEAR(l.dw_povm, analytic::delta_w_povm(sys, pops, kFigure), 1e-8);
            }
        }
    }
}

TEST(Ledger, QubitAtCommutingAnglesMatchesSpectral) {
    for (double theta : {0.0, std::numbers::pi}) {
        const DrivenQubit q{1.0, 1.0, theta};
        const auto r = qubit_run(q, SystemState::qubit(0.6, 0.8));
        const double s = std::cos(theta);
        const auto sys = SpectralSystem::polynomial({{0.0, s}, {0.0, -s}});
        for (auto c : {Convention::split, Convention::window, Convention::protocol}) {
            const auto lq = qubit_ledger(q, projector(0.6, 0.8), kFigure, r, c);
            const auto ls = spectral_ledger(sys, projector(0.6, 0.8), kFigure, kApparatus, c);
            EXPECT_NEAR(lq.w_free, ls.w_free, 1e-6);
            EXPECT_NEAR(lq.w_tilde, ls.w_tilde, 1e-6);
            EXPECT_NEAR(lq.du, ls.du, 1e-6);
            EXPECT_NEAR(lq.du_tilde, ls.du_tilde, 1e-6);
            EXPECT_NEAR(lq.dw_int, ls.dw_int, 1e-6);
            EXPECT_NEAR(lq.dq_int, ls.dq_int, 1e-6);
            EXPECT_NEAR(lq.dw_povm, ls.dw_povm, 1e-6);
        }
    }
}

TEST(Ledger, NonCommutingQubitHasInteractionTerms) {
    const DrivenQubit q{1.0, 1.0, std::numbers::pi / 2};
    const auto r = qubit_run(q, SystemState::qubit(kR, kR), 4096);
    const auto l = qubit_ledger(q, projector(kR, kR), kFigure, r, Convention::split);
    EXPECT_GT(std::abs(l.dw_int), 1e-3);
    EXPECT_GT(std::abs(l.dq_int), 1e-3);
}
