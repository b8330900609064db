#include "qwork/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qwork::analytic {

namespace {

constexpr double kQuadratureTolerance = 1e-10;

template <class F>
double integrate(F&& f, double lo, double hi) {
    if (hi == lo) return 0.0;
    if (hi < lo) return -integrate(f, hi, lo);
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-12, &error);
    if (!(error <= kQuadratureTolerance) || !std::isfinite(value)) {
        std::ostringstream os;
        os << "quadrature over [" << lo << ", " << hi << "] reached only " << error
           << " (requested " << kQuadratureTolerance << ")";
        throw numerical_error(os.str());
    }
    return value;
}

// ∫_{t_p}^{upper} g(t - center) E_n(t) dt over the window support.
double window_moment(const SpectralSystem& sys, const ProtocolSchedule& s, std::size_t n, double center,
                     double upper) {
    const double reach = kWindowSupport * s.delta;
    const double lo = std::max(s.t_p, center - reach);
    const double hi = std::min(upper, center + reach);
    if (hi <= lo) return 0.0;
    // One panel per Δ keeps each Kronrod estimate well conditioned.
    const auto panels = static_cast<int>(std::ceil((hi - lo) / s.delta - 1e-9));
    KahanSum sum;
    for (int k = 0; k < panels; ++k) {
        const double a = lo + (hi - lo) * k / panels;
        const double b = lo + (hi - lo) * (k + 1) / panels;
        sum.add(integrate([&](double t) { return window_value(s, t - center) * sys.energy(n, t); }, a, b));
    }
    return sum.value();
}

// ∫_{t_p}^{min(upper, t_m)} f(t) E_n(t) dt.
double partial_center(const SpectralSystem& sys, const ProtocolSchedule& s, std::size_t n, double upper) {
    if (s.degenerate()) return 0.0;
    upper = std::min(upper, s.t_m);
    return window_moment(sys, s, n, s.t_f, upper) - window_moment(sys, s, n, s.t_i, upper);
}

double log_sum_exp(const std::vector<double>& xs) {
    const double mx = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(mx)) return mx;
    KahanSum acc;
    for (double x : xs) acc.add(std::exp(x - mx));
    return mx + std::log(acc.value());
}

void check_populations(const std::vector<double>& p, std::size_t n) {
    if (p.empty()) throw std::invalid_argument("populations: empty");
    if (p.size() != n)
        throw std::invalid_argument("populations: expected " + std::to_string(n) + " entries, got " +
                                    std::to_string(p.size()));
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw std::invalid_argument("populations: negative probability");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("populations: must sum to 1");
}

double gaussian(double w, double center, double sigma) {
    const double z = (w - center) / sigma;
    return std::exp(-z * z) / (std::sqrt(std::numbers::pi) * sigma);
}

WorkDistribution mixture(const std::vector<double>& weights, const std::vector<double>& centers, double sigma,
                         double t, const std::vector<double>& grid, const char* engine) {
    WorkDistribution d;
    d.work = grid;
    d.density.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) d.density[k] = mixture_density(weights, centers, sigma, grid[k]);
    d.time = t;
    d.engine = engine;
    d.parameters["sigma"] = sigma;
    return d;
}

}  // namespace

void ThermalSpec::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("thermal: beta must be >= 0");
}

void CrooksPair::validate() const {
    schedule.validate();
    if (!(t >= schedule.t_p && t <= schedule.t_m))
        throw std::invalid_argument("crooks pair: t must lie in [t_p, t_m]");
}

double work_center(const SpectralSystem& sys, const ProtocolSchedule& schedule, std::size_t n) {
    if (n >= sys.dimension()) throw std::out_of_range("work_center: level index out of range");
    return partial_center(sys, schedule, n, schedule.t_m);
}

double partial_work_center(const SpectralSystem& sys, const ProtocolSchedule& schedule, std::size_t n, double t) {
    schedule.validate();
    if (n >= sys.dimension()) throw std::out_of_range("partial_work_center: level index out of range");
    return partial_center(sys, schedule, n, t);
}

std::vector<double> work_centers(const SpectralSystem& sys, const ProtocolSchedule& schedule) {
    std::vector<double> out(sys.dimension());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = work_center(sys, schedule, n);
    return out;
}

double mixture_density(const std::vector<double>& weights, const std::vector<double>& centers, double sigma,
                       double w) {
    double acc = 0.0;
    for (std::size_t n = 0; n < weights.size(); ++n) acc += weights[n] * gaussian(w, centers[n], sigma);
    return acc;
}

WorkDistribution work_distribution(const SpectralSystem& sys, const std::vector<double>& populations,
                                   const ProtocolSchedule& schedule, const ApparatusSpec& a, double t,
                                   const std::vector<double>& work_grid) {
    schedule.validate();
    a.validate();
    check_populations(populations, sys.dimension());
    if (t < schedule.t_p) throw std::invalid_argument("work_distribution: t must be >= t_p");
    const auto centers = work_centers(sys, schedule);
    return mixture(populations, centers, sigma_width(a, t, schedule.t_p), t, work_grid, "analytic");
}

double average_work_dist(const SpectralSystem& sys, const std::vector<double>& populations,
                         const ProtocolSchedule& schedule) {
    check_populations(populations, sys.dimension());
    KahanSum acc;
    for (std::size_t n = 0; n < populations.size(); ++n)
        acc.add(populations[n] * work_center(sys, schedule, n));
    return acc.value();
}

std::vector<double> gibbs_weights(const SpectralSystem& sys, const ThermalSpec& th, double t) {
    th.validate();
    const std::size_t n = sys.dimension();
    std::vector<double> logw(n);
    for (std::size_t k = 0; k < n; ++k) logw[k] = -th.beta * sys.energy(k, t);
    const double lz = log_sum_exp(logw);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = std::exp(logw[k] - lz);
    return w;
}

double log_partition_function(const SpectralSystem& sys, const ThermalSpec& th, double t) {
    th.validate();
    std::vector<double> logw(sys.dimension());
    for (std::size_t k = 0; k < logw.size(); ++k) logw[k] = -th.beta * sys.energy(k, t);
    return log_sum_exp(logw);
}

double partition_function(const SpectralSystem& sys, const ThermalSpec& th, double t) {
    return std::exp(log_partition_function(sys, th, t));
}

double free_energy_change(const SpectralSystem& sys, const ThermalSpec& th, const ProtocolSchedule& schedule) {
    th.validate();
    if (th.beta == 0.0) {
        KahanSum acc;
        for (std::size_t n = 0; n < sys.dimension(); ++n)
            acc.add(sys.energy(n, schedule.t_f) - sys.energy(n, schedule.t_i));
        return acc.value() / static_cast<double>(sys.dimension());
    }
    return -(log_partition_function(sys, th, schedule.t_f) - log_partition_function(sys, th, schedule.t_i)) /
           th.beta;
}

WorkDistribution thermal_work_distribution(const SpectralSystem& sys, const ThermalSpec& th,
                                           const ProtocolSchedule& schedule, const ApparatusSpec& a, double t,
                                           const std::vector<double>& work_grid) {
    schedule.validate();
    a.validate();
    if (t < schedule.t_p) throw std::invalid_argument("thermal_work_distribution: t must be >= t_p");
    const auto weights = gibbs_weights(sys, th, schedule.t_i);
    const auto centers = work_centers(sys, schedule);
    auto d = mixture(weights, centers, sigma_width(a, t, schedule.t_p), t, work_grid, "analytic-thermal");
    d.parameters["beta"] = th.beta;
    return d;
}

double crooks_ratio(const SpectralSystem& sys, const ThermalSpec& th, const CrooksPair& pair,
                    const ApparatusSpec& a, double w) {
    pair.validate();
    th.validate();
    a.validate();
    const auto& s = pair.schedule;
    const double sig_f = sigma_width(a, pair.t, s.t_p);
    const double sig_b = sigma_width(a, pair.backward_time(), s.t_p);
    const auto centers = work_centers(sys, s);
    const std::size_t n = sys.dimension();
    std::vector<double> num(n);
    std::vector<double> den(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double zf = (w - centers[k]) / sig_f;
        const double zb = (w - centers[k]) / sig_b;
        num[k] = -th.beta * sys.energy(k, s.t_i) - zf * zf;
        den[k] = -th.beta * sys.energy(k, s.t_f) - zb * zb;
    }
    const double lz_i = log_partition_function(sys, th, s.t_i);
    const double lz_f = log_partition_function(sys, th, s.t_f);
    const double log_den = log_sum_exp(den);
    // log P_B(-W, t_B)
    const double log_pb = log_den - lz_f - std::log(std::sqrt(std::numbers::pi) * sig_b);
    if (!(log_pb > std::log(std::numeric_limits<double>::min()))) {
        std::ostringstream os;
        os << "crooks_ratio: backward density underflows at W = " << w << " (outside its support)";
        throw numerical_error(os.str());
    }
    const double log_ratio = std::log(sig_b / sig_f) + lz_f - lz_i + log_sum_exp(num) - log_den;
    return std::exp(log_ratio);
}

double log_modified_jarzynski(const SpectralSystem& sys, const ThermalSpec& th,
                              const ProtocolSchedule& schedule, const ApparatusSpec& a) {
    schedule.validate();
    a.validate();
    th.validate();
    const auto centers = work_centers(sys, schedule);
    std::vector<double> terms(sys.dimension());
    for (std::size_t n = 0; n < terms.size(); ++n)
        terms[n] = -th.beta * (sys.energy(n, schedule.t_i) + centers[n]);
    const double sig = sigma_width(a, schedule.t_m, schedule.t_p);
    return th.beta * th.beta * sig * sig / 4.0 + log_sum_exp(terms) -
           log_partition_function(sys, th, schedule.t_i);
}

double modified_jarzynski(const SpectralSystem& sys, const ThermalSpec& th, const ProtocolSchedule& schedule,
                          const ApparatusSpec& a) {
    return std::exp(log_modified_jarzynski(sys, th, schedule, a));
}

SecondLawBound second_law_bound(const SpectralSystem& sys, const ThermalSpec& th,
                                const ProtocolSchedule& schedule, const ApparatusSpec& a) {
    schedule.validate();
    a.validate();
    const auto weights = gibbs_weights(sys, th, schedule.t_i);
    const auto centers = work_centers(sys, schedule);
    KahanSum lhs;
    for (std::size_t n = 0; n < weights.size(); ++n) lhs.add(weights[n] * centers[n]);

    SecondLawBound out{};
    out.lhs = lhs.value();
    const double sig = sigma_width(a, schedule.t_m, schedule.t_p);
    out.correction = -th.beta * sig * sig / 4.0;
    if (th.beta == 0.0) {
        // β → 0 limit of -(1/β) ln⟨e^{-βc}⟩ is the uniform mean of c.
        out.rhs = out.lhs;
        return out;
    }
    std::vector<double> terms(weights.size());
    for (std::size_t n = 0; n < terms.size(); ++n)
        terms[n] = -th.beta * (sys.energy(n, schedule.t_i) + centers[n]);
    const double lz_i = log_partition_function(sys, th, schedule.t_i);
    out.rhs = -(log_sum_exp(terms) - lz_i) / th.beta + out.correction;
    return out;
}

Eigen::MatrixXcd reduced_system_state(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_full,
                                      const ProtocolSchedule& schedule, const ApparatusSpec& a, double t) {
    schedule.validate();
    a.validate();
    validate_density_matrix(rho_full);
    const auto n = static_cast<Eigen::Index>(sys.dimension());
    if (rho_full.rows() != n) throw std::invalid_argument("reduced_system_state: dimension mismatch");
    std::vector<double> c(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = partial_center(sys, schedule, k, t);
    Eigen::MatrixXcd out = rho_full;
    const double sx = a.sigma_x();
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index s = 0; s < n; ++s) {
            if (r == s) continue;
            const double shift = a.lambda * (c[static_cast<std::size_t>(r)] - c[static_cast<std::size_t>(s)]);
            out(r, s) *= std::exp(-shift * shift / (4.0 * sx * sx));
        }
    }
    return out;
}

double delta_w_povm(const SpectralSystem& sys, const std::vector<double>& populations,
                    const ProtocolSchedule& schedule) {
    check_populations(populations, sys.dimension());
    KahanSum acc;
    for (std::size_t n = 0; n < populations.size(); ++n) {
        const double ideal = sys.energy(n, schedule.t_f) - sys.energy(n, schedule.t_i);
        acc.add(populations[n] * (work_center(sys, schedule, n) - ideal));
    }
    return acc.value();
}

Eigen::MatrixXcd free_state(const SpectralSystem& sys, const Eigen::MatrixXcd& rho_ti,
                            const ProtocolSchedule& schedule, double t) {
    const auto n = static_cast<Eigen::Index>(sys.dimension());
    if (rho_ti.rows() != n || rho_ti.cols() != n) throw std::invalid_argument("free_state: dimension mismatch");
    std::vector<double> phase(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
        phase[static_cast<std::size_t>(k)] = integrate([&](double s) { return sys.energy(k, s); }, schedule.t_i, t);
    Eigen::MatrixXcd out = rho_ti;
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s)
            out(r, s) *= std::polar(1.0, -(phase[static_cast<std::size_t>(r)] - phase[static_cast<std::size_t>(s)]));
    return out;
}

}  // namespace qwork::analytic
