#include "qwork/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qwork {

namespace {

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    return os.str();
}

}  // namespace

// ------------------------------ Schedule ------------------------------------

void ProtocolSchedule::validate() const {
    for (double v : {t_p, t_i, t_f, t_m, delta}) {
        if (!std::isfinite(v)) throw std::invalid_argument("schedule: all times must be finite");
    }
    if (!(t_p < t_i)) throw std::invalid_argument("schedule: require t_p < t_i");
    if (!(t_i <= t_f)) throw std::invalid_argument("schedule: require t_i <= t_f");
    if (!(t_f < t_m)) throw std::invalid_argument("schedule: require t_f < t_m");
    if (!(delta > 0.0)) throw std::invalid_argument(describe("schedule: delta must be > 0", delta));
}

double window_value(const ProtocolSchedule& schedule, double t) {
    const double d = schedule.delta;
    const double x = t / d;
    return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * d);
}

double sampling_function(const ProtocolSchedule& schedule, double t) {
    if (schedule.degenerate()) return 0.0;
    return window_value(schedule, t - schedule.t_f) - window_value(schedule, t - schedule.t_i);
}

double sampling_function_truncated(const ProtocolSchedule& schedule, double t) {
    if (schedule.degenerate()) return 0.0;
    const double reach = kWindowSupport * schedule.delta;
    double f = 0.0;
    if (std::abs(t - schedule.t_f) <= reach) f += window_value(schedule, t - schedule.t_f);
    if (std::abs(t - schedule.t_i) <= reach) f -= window_value(schedule, t - schedule.t_i);
    return f;
}

std::vector<std::pair<double, double>> active_intervals(const ProtocolSchedule& schedule) {
    std::vector<std::pair<double, double>> out;
    if (schedule.degenerate()) return out;
    const double reach = kWindowSupport * schedule.delta;
    std::vector<std::pair<double, double>> raw = {
        {schedule.t_i - reach, schedule.t_i + reach},
        {schedule.t_f - reach, schedule.t_f + reach},
    };
    for (auto [lo, hi] : raw) {
        lo = std::max(lo, schedule.t_p);
        hi = std::min(hi, schedule.t_m);
        if (hi <= lo) continue;
        if (!out.empty() && lo <= out.back().second) {
            out.back().second = std::max(out.back().second, hi);
        } else {
            out.emplace_back(lo, hi);
        }
    }
    return out;
}

// ------------------------------ Apparatus -----------------------------------

void ApparatusSpec::validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::invalid_argument(describe("apparatus: mass must be > 0", mass));
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p))
        throw std::invalid_argument(describe("apparatus: sigma_p must be > 0", sigma_p));
    if (lambda == 0.0 || !std::isfinite(lambda))
        throw std::invalid_argument(describe("apparatus: lambda must be non-zero", lambda));
}

cdouble apparatus_momentum_amplitude(const ApparatusSpec& a, double p, double t, double t_p) {
    const double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * a.sigma_p);
    const cdouble exponent{-p * p / (2.0 * a.sigma_p * a.sigma_p), -(t - t_p) * p * p / (2.0 * a.mass)};
    return norm * std::exp(exponent);
}

double sigma_width(const ApparatusSpec& a, double t, double t_p) {
    const double elapsed = t - t_p;
    const double spread = a.sigma_p * elapsed / a.mass;
    return std::sqrt(1.0 / (a.sigma_p * a.sigma_p) + spread * spread) / std::abs(a.lambda);
}

// ------------------------------ Systems -------------------------------------

SpectralSystem::SpectralSystem(std::vector<Trajectory> energies, std::vector<Trajectory> rates)
    : energies_(std::move(energies)), rates_(std::move(rates)) {
    if (energies_.empty()) throw std::invalid_argument("spectral system: no levels");
    if (!rates_.empty() && rates_.size() != energies_.size())
        throw std::invalid_argument("spectral system: one rate per level required");
}

SpectralSystem SpectralSystem::polynomial(std::vector<std::vector<double>> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("spectral system: no levels");
    std::vector<Trajectory> e;
    std::vector<Trajectory> r;
    for (const auto& c : coeffs) {
        if (c.empty()) throw std::invalid_argument("spectral system: empty polynomial");
        e.emplace_back([c](double t) {
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
            return acc;
        });
        r.emplace_back([c](double t) {
            double acc = 0.0;
            for (std::size_t k = c.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * c[k];
            return acc;
        });
    }
    SpectralSystem s(std::move(e), std::move(r));
    s.coeffs_ = std::move(coeffs);
    return s;
}

double SpectralSystem::energy(std::size_t n, double t) const { return energies_.at(n)(t); }

double SpectralSystem::energy_rate(std::size_t n, double t) const {
    if (!rates_.empty()) return rates_.at(n)(t);
    const auto& e = energies_.at(n);
    const double h = 1e-3 * std::max(1.0, std::abs(t));
    return (-e(t + 2 * h) + 8 * e(t + h) - 8 * e(t - h) + e(t - 2 * h)) / (12 * h);
}

Eigen::MatrixXcd SpectralSystem::hamiltonian(double t) const {
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) h(k, k) = energy(static_cast<std::size_t>(k), t);
    return h;
}

Eigen::MatrixXcd SpectralSystem::hamiltonian_rate(double t) const {
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) h(k, k) = energy_rate(static_cast<std::size_t>(k), t);
    return h;
}

void SpectralSystem::validate(const ProtocolSchedule& schedule) const {
    if (energies_.empty()) throw std::invalid_argument("spectral system: no levels");
    constexpr int kProbes = 257;
    for (std::size_t n = 0; n < dimension(); ++n) {
        for (int k = 0; k < kProbes; ++k) {
            const double t = schedule.t_p + (schedule.t_m - schedule.t_p) * k / (kProbes - 1);
            if (!std::isfinite(energy(n, t)))
                throw std::invalid_argument("spectral system: level " + std::to_string(n) +
                                            " is not finite on [t_p, t_m]");
        }
    }
}

void DrivenQubit::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument(describe("qubit: kappa must be > 0", kappa));
    if (!std::isfinite(omega)) throw std::invalid_argument("qubit: omega must be finite");
    if (!(theta >= 0.0 && theta <= std::numbers::pi + 1e-12))
        throw std::invalid_argument(describe("qubit: theta must lie in [0, pi]", theta));
}

bool DrivenQubit::self_commuting() const { return std::abs(std::sin(theta)) < 1e-12; }

Eigen::Matrix2cd qubit_hamiltonian(const DrivenQubit& q, double t) {
    const double scale = q.kappa * q.kappa * t;
    const double st = std::sin(q.theta);
    const double ct = std::cos(q.theta);
    const cdouble off = st * std::polar(1.0, -q.omega * t);
    Eigen::Matrix2cd h;
    h << ct, off, std::conj(off), -ct;
    return scale * h;
}

Eigen::Matrix2cd qubit_hamiltonian_rate(const DrivenQubit& q, double t) {
    const double k2 = q.kappa * q.kappa;
    const double st = std::sin(q.theta);
    const double ct = std::cos(q.theta);
    const cdouble phase = std::polar(1.0, -q.omega * t);
    // d/dt [t (ct σz + st e^{-iωt} σ+ + h.c.)]
    const cdouble off = st * phase * cdouble(1.0, -q.omega * t);
    Eigen::Matrix2cd h;
    h << ct, off, std::conj(off), -ct;
    return k2 * h;
}

// ------------------------------ States --------------------------------------

void validate_density_matrix(const Eigen::MatrixXcd& rho, double tol) {
    if (rho.rows() == 0 || rho.rows() != rho.cols())
        throw std::invalid_argument("density matrix must be square and non-empty");
    if (!rho.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(rho.trace() - cdouble(1.0)) > tol)
        throw std::invalid_argument("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("density matrix is not positive semidefinite");
}

SystemState SystemState::pure(Eigen::VectorXcd amplitudes) {
    if (amplitudes.size() == 0) throw std::invalid_argument("state: empty amplitude vector");
    if (!amplitudes.allFinite()) throw std::invalid_argument("state: non-finite amplitudes");
    if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-10)
        throw std::invalid_argument("state: amplitudes must satisfy sum |c|^2 = 1");
    SystemState s;
    s.pure_ = true;
    s.rho_ = amplitudes * amplitudes.adjoint();
    s.psi_ = std::move(amplitudes);
    return s;
}

SystemState SystemState::mixed(Eigen::MatrixXcd rho) {
    validate_density_matrix(rho);
    SystemState s;
    s.pure_ = false;
    s.rho_ = std::move(rho);
    return s;
}

SystemState SystemState::qubit(cdouble alpha, cdouble beta) {
    Eigen::VectorXcd v(2);
    v << alpha, beta;
    return pure(std::move(v));
}

const Eigen::VectorXcd& SystemState::amplitudes() const {
    if (!pure_) throw std::logic_error("state: amplitudes requested from a mixed state");
    return psi_;
}

std::vector<std::pair<double, Eigen::VectorXcd>> SystemState::pure_components() const {
    if (pure_) return {{1.0, psi_}};
    std::vector<std::pair<double, Eigen::VectorXcd>> out;
    // Diagonal inputs decompose onto the basis directly, which keeps the
    // components (and anything computed from them) free of eigen-solver noise.
    const Eigen::MatrixXcd off = rho_ - Eigen::MatrixXcd(rho_.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() == 0.0) {
        for (Eigen::Index k = 0; k < rho_.rows(); ++k) {
            const double w = rho_(k, k).real();
            if (w < 1e-15) continue;
            out.emplace_back(w, Eigen::VectorXcd::Unit(rho_.rows(), k));
        }
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_);
    for (Eigen::Index k = 0; k < rho_.rows(); ++k) {
        const double w = es.eigenvalues()(k);
        if (w < 1e-15) continue;
        out.emplace_back(w, es.eigenvectors().col(k));
    }
    return out;
}

// ------------------------------ Distributions -------------------------------

double WorkDistribution::integral() const {
    KahanSum s;
    for (std::size_t k = 1; k < work.size(); ++k)
        s.add(0.5 * (density[k] + density[k - 1]) * (work[k] - work[k - 1]));
    return s.value();
}

double WorkDistribution::mean() const {
    KahanSum s;
    for (std::size_t k = 1; k < work.size(); ++k)
        s.add(0.5 * (work[k] * density[k] + work[k - 1] * density[k - 1]) * (work[k] - work[k - 1]));
    return s.value() / integral();
}

void WorkDistribution::check(double coverage) const {
    if (work.size() != density.size() || work.size() < 2)
        throw numerical_error("work distribution: grid and density size mismatch");
    for (std::size_t k = 0; k < density.size(); ++k) {
        if (!(density[k] >= 0.0))
            throw numerical_error("work distribution: negative or non-finite density at W = " +
                                  std::to_string(work[k]));
    }
    const double total = integral();
    if (std::abs(total - 1.0) > coverage) {
        std::ostringstream os;
        os << "work distribution: integral " << total << " outside 1 +/- " << coverage;
        throw numerical_error(os.str());
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw std::invalid_argument("linspace: need at least two points");
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) out[k] = lo + step * static_cast<double>(k);
    out.back() = hi;
    return out;
}

std::vector<double> default_work_grid(const std::vector<double>& centers, double sigma, std::size_t n) {
    if (centers.empty()) throw std::invalid_argument("work grid: no centers");
    const auto [lo, hi] = std::minmax_element(centers.begin(), centers.end());
    return linspace(*lo - 8.0 * sigma, *hi + 8.0 * sigma, n);
}

void KahanSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

}  // namespace qwork
