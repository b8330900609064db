#include "qwork/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qwork::oracle {

namespace {

// exp(Ω) for a 2×2 matrix with Ω - tr(Ω)/2 anti-Hermitian.
Eigen::Matrix2cd expm2(const Eigen::Matrix2cd& omega) {
    const cdouble half_trace = 0.5 * omega.trace();
    const Eigen::Matrix2cd traceless = omega - half_trace * Eigen::Matrix2cd::Identity();
    const double r = std::sqrt(std::max(0.0, -(traceless * traceless)(0, 0).real()));
    const double sinc = r < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r;
    return std::exp(half_trace) * (std::cos(r) * Eigen::Matrix2cd::Identity() + sinc * traceless);
}

DiscreteWorkDistribution merged(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.work < y.work; });
    DiscreteWorkDistribution out;
    for (const auto& a : atoms) {
        if (!out.atoms.empty() && std::abs(out.atoms.back().work - a.work) <= 1e-12 * std::max(1.0, std::abs(a.work)))
            out.atoms.back().weight += a.weight;
        else
            out.atoms.push_back(a);
    }
    return out;
}

// Cumulative trapezoid of the density on its own grid.
std::vector<double> cumulative(const WorkDistribution& d) {
    std::vector<double> c(d.work.size(), 0.0);
    for (std::size_t k = 1; k < d.work.size(); ++k)
        c[k] = c[k - 1] + 0.5 * (d.work[k] - d.work[k - 1]) * (d.density[k] + d.density[k - 1]);
    return c;
}

double cumulative_at(const WorkDistribution& d, const std::vector<double>& c, double w) {
    if (w <= d.work.front()) return 0.0;
    if (w >= d.work.back()) return c.back();
    const auto it = std::upper_bound(d.work.begin(), d.work.end(), w);
    const auto k = static_cast<std::size_t>(it - d.work.begin()) - 1;
    const double h = d.work[k + 1] - d.work[k];
    const double s = (w - d.work[k]) / h;
    // Exact integral of the linear interpolant over [W_k, w].
    const double p = d.density[k] + s * (d.density[k + 1] - d.density[k]);
    return c[k] + 0.5 * (w - d.work[k]) * (d.density[k] + p);
}

}  // namespace

void DiscreteWorkDistribution::validate(double tol) const {
    for (const auto& a : atoms)
        if (!(a.weight >= -tol)) throw numerical_error("discrete distribution: negative weight");
    if (std::abs(total() - 1.0) > tol) {
        std::ostringstream os;
        os << "discrete distribution: weights sum to " << total();
        throw numerical_error(os.str());
    }
}

double DiscreteWorkDistribution::total() const {
    KahanSum s;
    for (const auto& a : atoms) s.add(a.weight);
    return s.value();
}

double DiscreteWorkDistribution::mean() const {
    KahanSum s;
    for (const auto& a : atoms) s.add(a.weight * a.work);
    return s.value();
}

double DiscreteWorkDistribution::weight_at(double w, double tol) const {
    for (const auto& a : atoms)
        if (std::abs(a.work - w) <= tol) return a.weight;
    return 0.0;
}

Eigen::Matrix2cd magnus_propagator(const DrivenQubit& q, double from, double to, std::size_t steps) {
    q.validate();
    if (from == to) return Eigen::Matrix2cd::Identity();
    if (steps == 0) steps = static_cast<std::size_t>(std::max(16.0, std::ceil(1000.0 * std::abs(to - from))));
    const double h = (to - from) / static_cast<double>(steps);
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const cdouble mi(0.0, -1.0);
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (std::size_t j = 0; j < steps; ++j) {
        const double t = from + h * static_cast<double>(j);
        const Eigen::Matrix2cd a1 = mi * qubit_hamiltonian(q, t + c1 * h);
        const Eigen::Matrix2cd a2 = mi * qubit_hamiltonian(q, t + c2 * h);
        const Eigen::Matrix2cd omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) * h * h / 12.0) * (a2 * a1 - a1 * a2);
        u = expm2(omega) * u;
    }
    return u;
}

Eigen::Matrix2cd instantaneous_basis(const DrivenQubit& q, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(qubit_hamiltonian(q, t));
    if (es.info() != Eigen::Success) throw numerical_error("instantaneous_basis: eigen-decomposition failed");
    return es.eigenvectors();
}

Eigen::Matrix2d transition_matrix(const DrivenQubit& q, const ProtocolSchedule& schedule) {
    schedule.validate();
    const Eigen::Matrix2cd vi = instantaneous_basis(q, schedule.t_i);
    const Eigen::Matrix2cd vf = instantaneous_basis(q, schedule.t_f);
    const Eigen::Matrix2cd amp = vf.adjoint() * magnus_propagator(q, schedule.t_i, schedule.t_f) * vi;
    Eigen::Matrix2d p;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) p(m, n) = std::norm(amp(n, m));
    return p;
}

DiscreteWorkDistribution two_point_distribution(const DrivenQubit& q, const Eigen::Matrix2cd& rho_ti,
                                                const ProtocolSchedule& schedule) {
    validate_density_matrix(rho_ti);
    const Eigen::Matrix2cd vi = instantaneous_basis(q, schedule.t_i);
    const Eigen::Vector2d ei = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(qubit_hamiltonian(q, schedule.t_i))
                                   .eigenvalues();
    const Eigen::Vector2d ef = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(qubit_hamiltonian(q, schedule.t_f))
                                   .eigenvalues();
    const Eigen::Matrix2d p = transition_matrix(q, schedule);
    std::vector<Atom> atoms;
    for (int m = 0; m < 2; ++m) {
        const double pm = (vi.col(m).adjoint() * rho_ti * vi.col(m))(0, 0).real();
        for (int n = 0; n < 2; ++n) atoms.push_back({ef(n) - ei(m), pm * p(m, n)});
    }
    return merged(std::move(atoms));
}

DiscreteWorkDistribution two_point_distribution(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                                                const ProtocolSchedule& schedule) {
    schedule.validate();
    validate_density_matrix(rho_ti);
    if (static_cast<std::size_t>(rho_ti.rows()) != sys.dimension())
        throw std::invalid_argument("two_point_distribution: dimension mismatch");
    std::vector<Atom> atoms;
    for (std::size_t n = 0; n < sys.dimension(); ++n) {
        const auto k = static_cast<Eigen::Index>(n);
        atoms.push_back({sys.energy(n, schedule.t_f) - sys.energy(n, schedule.t_i), rho_ti(k, k).real()});
    }
    return merged(std::move(atoms));
}

Eigen::Matrix2cd PovmEffects::completeness() const {
    Eigen::Matrix2cd total = Eigen::Matrix2cd::Zero();
    for (std::size_t k = 1; k < work.size(); ++k) total += 0.5 * (work[k] - work[k - 1]) * (effects[k] + effects[k - 1]);
    return total;
}

double PovmEffects::min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& e : effects) lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(e).eigenvalues()(0));
    return lo;
}

std::vector<double> PovmEffects::probability(const Eigen::Matrix2cd& rho) const {
    std::vector<double> out;
    out.reserve(effects.size());
    for (const auto& e : effects) out.push_back((e * rho).trace().real());
    return out;
}

PovmEffects povm_effects_qubit(const DrivenQubit& q, const ProtocolSchedule& schedule, const ApparatusSpec& a,
                               const numeric::MomentumGrid& grid, const std::vector<double>& work_grid,
                               const numeric::SolverOptions& options) {
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<Eigen::Vector2cd> probes = {
        Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0), Eigen::Vector2cd(r, r),
        Eigen::Vector2cd(r, cdouble(0.0, r))};
    std::vector<std::vector<double>> p;
    for (const auto& v : probes)
        p.push_back(numeric::mixed_state_distribution(q, {{1.0, v}}, schedule, a, grid, work_grid, options).density);

    PovmEffects out;
    out.work = work_grid;
    for (std::size_t k = 0; k < work_grid.size(); ++k) {
        const double e00 = p[0][k];
        const double e11 = p[1][k];
        const double mean = 0.5 * (e00 + e11);
        const cdouble e01(p[2][k] - mean, mean - p[3][k]);
        Eigen::Matrix2cd e;
        e << e00, e01, std::conj(e01), e11;
        out.effects.push_back(e);
    }
    return out;
}

Expectation quadrature_expectation(const WorkDistribution& dist, Weight weight, double beta, double coverage) {
    const std::size_t n = dist.work.size();
    if (n < 3 || dist.density.size() != n) throw std::invalid_argument("quadrature_expectation: malformed distribution");
    // An odd number of points so that every other point spans the same range.
    const std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
    auto w_of = [&](double w) { return weight == Weight::work ? w : std::exp(-beta * w); };
    auto trapezoid = [&](std::size_t stride, bool weighted) {
        KahanSum s;
        for (std::size_t k = stride; k <= last; k += stride) {
            const double lo = dist.density[k - stride] * (weighted ? w_of(dist.work[k - stride]) : 1.0);
            const double hi = dist.density[k] * (weighted ? w_of(dist.work[k]) : 1.0);
            s.add(0.5 * (dist.work[k] - dist.work[k - stride]) * (lo + hi));
        }
        return s.value();
    };
    Expectation e;
    e.mass = trapezoid(1, false);
    if (!(std::abs(e.mass - 1.0) <= coverage)) {
        std::ostringstream os;
        os << "quadrature_expectation: grid holds mass " << e.mass << ", outside 1 +/- " << coverage;
        throw numerical_error(os.str());
    }
    const double fine = trapezoid(1, true);
    const double coarse = trapezoid(2, true);
    e.value = (4.0 * fine - coarse) / 3.0;
    e.error = std::abs(fine - coarse);
    return e;
}

std::vector<double> peak_weights(const WorkDistribution& dist, const std::vector<double>& positions,
                                 double half_width) {
    if (dist.work.size() < 2) throw std::invalid_argument("peak_weights: empty distribution");
    std::vector<double> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    const auto c = cumulative(dist);
    std::vector<double> out;
    for (double x : positions) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        const auto j = static_cast<std::size_t>(it - sorted.begin());
        double lo = x - half_width;
        double hi = x + half_width;
        if (j > 0) lo = std::max(lo, 0.5 * (sorted[j - 1] + x));
        if (j + 1 < sorted.size()) hi = std::min(hi, 0.5 * (sorted[j + 1] + x));
        out.push_back(cumulative_at(dist, c, hi) - cumulative_at(dist, c, lo));
    }
    return out;
}

double atom_weight_distance(const WorkDistribution& dist, const DiscreteWorkDistribution& tmp, double sigma) {
    std::vector<double> where;
    for (const auto& a : tmp.atoms) where.push_back(a.work);
    const auto w = peak_weights(dist, where, 4.0 * sigma);
    double worst = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) worst = std::max(worst, std::abs(w[j] - tmp.atoms[j].weight));
    return worst;
}

std::vector<Rung> LadderSpec::rungs() const {
    if (scales.size() < 3) throw std::invalid_argument("ideal-limit ladder: need at least 3 rungs");
    std::vector<Rung> out;
    for (double e : scales) {
        if (!(e > 0.0)) throw std::invalid_argument("ideal-limit ladder: scales must be positive");
        Rung r{e, schedule, apparatus};
        r.schedule.delta = schedule.delta * e;
        r.apparatus.sigma_p = apparatus.sigma_p / e;
        r.apparatus.mass = apparatus.mass / (e * e * e);
        r.schedule.validate();
        r.apparatus.validate();
        out.push_back(r);
    }
    return out;
}

ConvergenceReport ideal_limit_sweep(const std::function<double(const Rung&)>& distance, const LadderSpec& spec) {
    ConvergenceReport rep;
    for (const auto& r : spec.rungs()) {
        rep.scales.push_back(r.scale);
        rep.distances.push_back(distance(r));
    }
    rep.monotone = true;
    for (std::size_t j = 1; j < rep.distances.size(); ++j)
        rep.monotone = rep.monotone && rep.distances[j] < rep.distances[j - 1];
    return rep;
}

}  // namespace qwork::oracle
