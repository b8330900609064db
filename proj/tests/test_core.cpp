#include "oracles.hpp"
#include "qwork/core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qwork;
namespace to = testing_oracles;

namespace {

const ProtocolSchedule kFigure{0.0, 2.0, 3.0, 4.0, 0.2};

}  // namespace

TEST(Schedule, ValidatesOrdering) {
    EXPECT_NO_THROW(kFigure.validate());
    EXPECT_THROW((ProtocolSchedule{0.0, 3.0, 2.0, 4.0, 0.2}.validate()), std::invalid_argument);
    EXPECT_THROW((ProtocolSchedule{2.0, 2.0, 3.0, 4.0, 0.2}.validate()), std::invalid_argument);
    EXPECT_THROW((ProtocolSchedule{0.0, 2.0, 3.0, 3.0, 0.2}.validate()), std::invalid_argument);
    EXPECT_THROW((ProtocolSchedule{0.0, 2.0, 3.0, 4.0, 0.0}.validate()), std::invalid_argument);
    EXPECT_THROW((ProtocolSchedule{0.0, 2.0, 3.0, NAN, 0.2}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((ProtocolSchedule{0.0, 2.0, 2.0, 4.0, 0.2}.validate()));
    EXPECT_FALSE(kFigure.windows_disjoint());
    EXPECT_TRUE((ProtocolSchedule{0.0, 2.0, 3.0, 4.0, 0.1}.windows_disjoint()));
}

TEST(Window, PeakAndTails) {
    EXPECT_NEAR(window_value(kFigure, 0.0), 1.0 / (std::sqrt(std::numbers::pi) * 0.2), 1e-14);
    EXPECT_NEAR(window_value(kFigure, 0.0), 2.8209, 1e-4);
    EXPECT_EQ(window_value(kFigure, 1e3), 0.0);
    EXPECT_EQ(window_value(kFigure, -1e3), 0.0);
}

TEST(Window, IntegratesToOne) {
    const double d = kFigure.delta;
    const double area = to::simpson([&](double t) { return window_value(kFigure, t); }, -6 * d, 6 * d, 2000);
    EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(SamplingFunction, IdenticalWindowsCancel) {
    const ProtocolSchedule s{0.0, 2.0, 2.0, 4.0, 0.2};
    for (double t : {0.0, 1.9, 2.0, 2.3, 4.0}) EXPECT_EQ(sampling_function(s, t), 0.0);
}

TEST(SamplingFunction, SecondWindowDominatesAtTf) {
    const double peak = 1.0 / (std::sqrt(std::numbers::pi) * 0.2);
    EXPECT_NEAR(sampling_function(kFigure, 3.0), peak, peak * 1e-10);
    EXPECT_NEAR(sampling_function(kFigure, 2.0), -peak, peak * 1e-10);
}

TEST(SamplingFunction, ZeroAreaAndTruncation) {
    const double area = to::simpson([](double t) { return sampling_function(kFigure, t); }, 0.0, 4.0, 8000);
    EXPECT_NEAR(area, 0.0, 1e-10);
    EXPECT_EQ(sampling_function_truncated(kFigure, 2.0 - 6.5 * 0.2), 0.0);
    EXPECT_NE(sampling_function(kFigure, 2.0 - 6.5 * 0.2), 0.0);
    EXPECT_EQ(sampling_function_truncated(kFigure, 3.0), sampling_function(kFigure, 3.0));
    const auto iv = active_intervals(kFigure);
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_NEAR(iv[0].first, 0.8, 1e-12);
    EXPECT_NEAR(iv[0].second, 4.0, 1e-12);
    const auto split = active_intervals({0.0, 2.0, 5.0, 8.0, 0.2});
    ASSERT_EQ(split.size(), 2u);
    EXPECT_NEAR(split[0].second, 3.2, 1e-12);
    EXPECT_NEAR(split[1].first, 3.8, 1e-12);
}

TEST(QubitHamiltonian, CommutingCase) {
    const DrivenQubit q{1.0, 1.0, 0.0};
    const auto h = qubit_hamiltonian(q, 2.5);
    EXPECT_NEAR(h(0, 0).real(), 2.5, 1e-15);
    EXPECT_NEAR(h(1, 1).real(), -2.5, 1e-15);
    EXPECT_EQ(std::abs(h(0, 1)), 0.0);
    EXPECT_TRUE(q.self_commuting());
}

TEST(QubitHamiltonian, EigenvaluesAndHermiticity) {
    for (double theta : {0.0, 0.7, std::numbers::pi / 2}) {
        const DrivenQubit q{1.0, 1.0, theta};
        const auto h = qubit_hamiltonian(q, 2.0);
        EXPECT_LT((h - h.adjoint()).norm(), 1e-15);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
        EXPECT_NEAR(es.eigenvalues()(0), -2.0, 1e-13);
        EXPECT_NEAR(es.eigenvalues()(1), 2.0, 1e-13);
    }
}

// [n1·σ, n2·σ] = 2i (n1 × n2)·σ and ‖v·σ‖_F = √2 |v|.
TEST(QubitHamiltonian, CommutatorMatchesCrossProduct) {
    const double t1 = 2.0;
    const double t2 = 3.1;
    for (double theta : {std::numbers::pi / 4, std::numbers::pi / 2, 2.0}) {
        const DrivenQubit q{1.0, 1.0, theta};
        const auto a = qubit_hamiltonian(q, t1);
        const auto b = qubit_hamiltonian(q, t2);
        auto axis = [&](double t) {
            return Eigen::Vector3d(std::sin(theta) * std::cos(t), std::sin(theta) * std::sin(t), std::cos(theta));
        };
        const double expect = 2.0 * t1 * t2 * std::sqrt(2.0) * axis(t1).cross(axis(t2)).norm();
        EXPECT_NEAR((a * b - b * a).norm(), expect, 1e-12);
    }
    const DrivenQubit commuting{1.0, 1.0, 0.0};
    const auto a = qubit_hamiltonian(commuting, t1);
    const auto b = qubit_hamiltonian(commuting, t2);
    EXPECT_EQ((a * b - b * a).norm(), 0.0);
}

TEST(QubitHamiltonian, RateMatchesFiniteDifference) {
    const DrivenQubit q{1.0, 1.0, 1.1};
    const double t = 2.7;
    const double h = 1e-5;
    const Eigen::Matrix2cd fd = (qubit_hamiltonian(q, t + h) - qubit_hamiltonian(q, t - h)) / (2 * h);
    EXPECT_LT((qubit_hamiltonian_rate(q, t) - fd).norm(), 1e-8);
}

TEST(Apparatus, AmplitudeProperties) {
    const ApparatusSpec a{1000.0, 1.3, 1.0};
    const double p0 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * a.sigma_p);
    EXPECT_NEAR(std::abs(apparatus_momentum_amplitude(a, 0.0, 3.0, 0.0)), p0, 1e-15);
    for (double p : {-2.0, 0.4, 1.7})
        EXPECT_NEAR(std::norm(apparatus_momentum_amplitude(a, p, 0.0, 0.0)),
                    std::norm(apparatus_momentum_amplitude(a, p, 3.7, 0.0)), 1e-15);
    const double norm = to::simpson([&](double p) { return std::norm(apparatus_momentum_amplitude(a, p, 2.0, 0.0)); },
                                    -12 * a.sigma_p, 12 * a.sigma_p, 4000);
    EXPECT_NEAR(norm, 1.0, 1e-10);
}

TEST(Apparatus, SigmaWidth) {
    EXPECT_NEAR(sigma_width({1000.0, 2.0, 1.0}, 0.0, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(sigma_width({1.0, 1.0, 1.0}, 1.0, 0.0), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(sigma_width({1e300, 2.0, 1.0}, 50.0, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(sigma_width({1000.0, 1.0, 2.0}, 0.0, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(sigma_width({1000.0, 1.0, -2.0}, 0.0, 0.0), 0.5, 1e-15);
    EXPECT_THROW((ApparatusSpec{0.0, 1.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((ApparatusSpec{1.0, -1.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((ApparatusSpec{1.0, 1.0, 0.0}.validate()), std::invalid_argument);
}

TEST(SpectralSystem, PolynomialAndRates) {
    const auto sys = SpectralSystem::polynomial({{1.0, 2.0, 3.0}, {0.0, -1.0}});
    EXPECT_EQ(sys.dimension(), 2u);
    EXPECT_DOUBLE_EQ(sys.energy(0, 2.0), 1.0 + 4.0 + 12.0);
    EXPECT_DOUBLE_EQ(sys.energy_rate(0, 2.0), 2.0 + 12.0);
    EXPECT_DOUBLE_EQ(sys.energy_rate(1, 5.0), -1.0);
    const auto h = sys.hamiltonian(2.0);
    EXPECT_DOUBLE_EQ(h(1, 1).real(), -2.0);
    EXPECT_EQ(std::abs(h(0, 1)), 0.0);

    const SpectralSystem numeric_rate({[](double t) { return std::sin(t); }});
    EXPECT_NEAR(numeric_rate.energy_rate(0, 1.3), std::cos(1.3), 1e-9);

    const SpectralSystem bad({[](double t) { return t > 3.5 ? NAN : t; }});
    EXPECT_THROW(bad.validate(kFigure), std::invalid_argument);
    EXPECT_NO_THROW(bad.validate({0.0, 2.0, 3.0, 3.4, 0.2}));
}

TEST(States, ConstructionAndValidation) {
    const double r = 1.0 / std::sqrt(2.0);
    const auto s = SystemState::qubit(r, cdouble(0.0, r));
    EXPECT_TRUE(s.is_pure());
    EXPECT_NEAR(s.density()(0, 1).imag(), -0.5, 1e-15);
    EXPECT_THROW(SystemState::qubit(1.0, 1.0), std::invalid_argument);

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
    rho(0, 0) = 0.25;
    rho(1, 1) = 0.75;
    const auto m = SystemState::mixed(rho);
    const auto comps = m.pure_components();
    double total = 0.0;
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto& [w, v] : comps) {
        total += w;
        rebuilt += w * v * v.adjoint();
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    EXPECT_LT((rebuilt - rho).norm(), 1e-14);

    rho(0, 0) = 0.5;
    EXPECT_THROW(SystemState::mixed(rho), std::invalid_argument);
    Eigen::MatrixXcd negative = Eigen::MatrixXcd::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    EXPECT_THROW(validate_density_matrix(negative), std::invalid_argument);
}

TEST(Distribution, IntegralAndCheck) {
    WorkDistribution d;
    d.work = linspace(-8.0, 8.0, 4001);
    for (double w : d.work) d.density.push_back(to::gaussian(w, 0.5, 1.0));
    EXPECT_NEAR(d.integral(), 1.0, 1e-12);
    EXPECT_NEAR(d.mean(), 0.5, 1e-12);
    EXPECT_NO_THROW(d.check(1e-8));
    for (double& p : d.density) p *= 0.9;
    EXPECT_THROW(d.check(1e-4), numerical_error);
    d.density[10] = -1e-3;
    EXPECT_THROW(d.check(1.0), numerical_error);
}

TEST(Grids, LinspaceAndDefaultWorkGrid) {
    const auto x = linspace(-1.0, 1.0, 5);
    ASSERT_EQ(x.size(), 5u);
    EXPECT_DOUBLE_EQ(x[2], 0.0);
    const auto g = default_work_grid({-1.0, 1.0}, 0.5, 101);
    EXPECT_DOUBLE_EQ(g.front(), -5.0);
    EXPECT_DOUBLE_EQ(g.back(), 5.0);
}

TEST(Summation, Compensated) {
    KahanSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    EXPECT_NEAR(s.value(), 1e-13, 1e-25);
}
