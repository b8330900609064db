// Test-side reference formulas, written independently of the library.

#pragma once

#include "qwork/core.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace testing_oracles {

// ∫ exp(-(t-c)²/Δ²)/(√π Δ) t^k dt for k = 0..3.
inline double gaussian_moment(double c, double delta, int k) {
    const double v = delta * delta / 2.0;  // variance
    switch (k) {
        case 0: return 1.0;
        case 1: return c;
        case 2: return c * c + v;
        case 3: return c * c * c + 3.0 * c * v;
        default: return std::nan("");
    }
}

// ∫_a^b exp(-(t-c)²/Δ²)/(√π Δ) t^k dt by the recurrence
// M_k = c M_{k-1} + (Δ²/2)(k-1) M_{k-2} - (Δ²/2)[t^{k-1} g]_a^b.
inline double clipped_moment(double c, double delta, double a, double b, int k) {
    auto g = [&](double t) { return std::exp(-(t - c) * (t - c) / (delta * delta)) / (std::sqrt(std::numbers::pi) * delta); };
    const double h = delta * delta / 2.0;
    double m2 = 0.0;
    double m1 = 0.5 * (std::erf((b - c) / delta) - std::erf((a - c) / delta));
    for (int j = 1; j <= k; ++j) {
        const double m = c * m1 + h * (j - 1) * m2 - h * (std::pow(b, j - 1) * g(b) - std::pow(a, j - 1) * g(a));
        m2 = m1;
        m1 = m;
    }
    return m1;
}

// Work center of a polynomial level E(t) = Σ a_k t^k with both windows cut
// to ±6Δ and clipped to [t_p, t_m].
inline double polynomial_center(const std::vector<double>& a, const qwork::ProtocolSchedule& s) {
    auto window = [&](double center) {
        const double lo = std::max(s.t_p, center - 6.0 * s.delta);
        const double hi = std::min(s.t_m, center + 6.0 * s.delta);
        double v = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * clipped_moment(center, s.delta, lo, hi, static_cast<int>(k));
        return v;
    };
    return window(s.t_f) - window(s.t_i);
}

// Unclipped, untruncated windows.
inline double polynomial_center(const std::vector<double>& a, double t_i, double t_f, double delta) {
    double c = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        c += a[k] * (gaussian_moment(t_f, delta, static_cast<int>(k)) - gaussian_moment(t_i, delta, static_cast<int>(k)));
    return c;
}

inline double polynomial_value(const std::vector<double>& a, double t) {
    double v = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) v = v * t + a[k];
    return v;
}

// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

// Simpson over sampled values on a uniform grid (odd number of samples).
inline double simpson_samples(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double h = x[1] - x[0];
    double s = y.front() + y.back();
    for (std::size_t k = 1; k + 1 < n; ++k) s += (k % 2 ? 4.0 : 2.0) * y[k];
    return s * h / 3.0;
}

inline double gaussian(double w, double c, double sigma) {
    const double x = (w - c) / sigma;
    return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * sigma);
}

inline double mixture(const std::vector<double>& weights, const std::vector<double>& centers, double sigma,
                      double w) {
    double s = 0.0;
    for (std::size_t n = 0; n < weights.size(); ++n) s += weights[n] * gaussian(w, centers[n], sigma);
    return s;
}

inline double dispersion_width(double sigma_p, double mass, double lambda, double dt) {
    return std::sqrt(1.0 / (sigma_p * sigma_p) + sigma_p * sigma_p * dt * dt / (mass * mass)) / std::abs(lambda);
}

inline std::vector<double> gibbs(const std::vector<double>& energies, double beta) {
    double emin = energies[0];
    for (double e : energies) emin = std::min(emin, e);
    std::vector<double> w;
    double z = 0.0;
    for (double e : energies) {
        w.push_back(std::exp(-beta * (e - emin)));
        z += w.back();
    }
    for (double& x : w) x /= z;
    return w;
}

// Random polynomial spectra: dimension 2..4, degree ≤ 3, coefficients O(1).
struct RandomSpectrum {
    std::vector<std::vector<double>> coeffs;
};

inline RandomSpectrum random_spectrum(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(2, 4);
    std::uniform_int_distribution<int> deg(1, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RandomSpectrum r;
    const int n = dim(rng);
    for (int i = 0; i < n; ++i) {
        std::vector<double> a(static_cast<std::size_t>(deg(rng)) + 1);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = u(rng) / static_cast<double>(1 + k * k);
        r.coeffs.push_back(a);
    }
    return r;
}

// Random density matrix ρ = A A† / tr(A A†).
inline Eigen::MatrixXcd random_density(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
    Eigen::MatrixXcd rho = a * a.adjoint();
    return rho / rho.trace().real();
}

}  // namespace testing_oracles
