#include "qwork/cli.hpp"

#include "qwork/analytic.hpp"
#include "qwork/core.hpp"
#include "qwork/numeric.hpp"
#include "qwork/oracle.hpp"
#include "qwork/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qwork::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kEmitCoverage = 1e-4;
constexpr double kNormDriftLimit = 1e-8;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double get(const Json& cfg, const char* section, const char* key) { return cfg.at(section).at(key).get<double>(); }

std::vector<double> numbers(const Json& a) {
    std::vector<double> out;
    for (const auto& v : a) out.push_back(v.get<double>());
    return out;
}

ProtocolSchedule schedule_of(const Json& cfg) {
    return {get(cfg, "schedule", "t_p"), get(cfg, "schedule", "t_i"), get(cfg, "schedule", "t_f"),
            get(cfg, "schedule", "t_m"), get(cfg, "schedule", "delta")};
}

ApparatusSpec apparatus_of(const Json& cfg) {
    return {get(cfg, "apparatus", "mass"), get(cfg, "apparatus", "sigma_p"), get(cfg, "apparatus", "lambda")};
}

DrivenQubit qubit_of(const Json& cfg, double theta) {
    return {get(cfg, "qubit", "kappa"), get(cfg, "qubit", "omega"), theta};
}

std::vector<double> thetas_of(const Json& cfg) {
    auto t = numbers(cfg.at("qubit").at("thetas"));
    if (t.empty()) t.push_back(get(cfg, "qubit", "theta"));
    return t;
}

SpectralSystem spectral_of(const Json& cfg) {
    std::vector<std::vector<double>> coeffs;
    for (const auto& level : cfg.at("spectral").at("energies")) coeffs.push_back(numbers(level));
    return SpectralSystem::polynomial(coeffs);
}

SystemState qubit_state_of(const Json& cfg) {
    const Json& st = cfg.at("state");
    if (st.at("kind") == "mixture") {
        const auto p = numbers(st.at("populations"));
        if (p.size() != 2) throw config_error("state.populations: a qubit mixture needs 2 populations");
        Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
        rho(0, 0) = p[0];
        rho(1, 1) = p[1];
        try {
            return SystemState::mixed(rho);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("state.populations: ") + e.what());
        }
    }
    const auto a = numbers(st.at("alpha"));
    const auto b = numbers(st.at("beta"));
    const cdouble alpha(a[0], a[1]);
    const cdouble beta(b[0], b[1]);
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
        throw config_error("state: |alpha|^2 + |beta|^2 must equal 1");
    return SystemState::qubit(alpha, beta);
}

numeric::SolverOptions solver_of(const Json& cfg) {
    numeric::SolverOptions o;
    o.rtol = get(cfg, "solver", "rtol");
    o.atol = get(cfg, "solver", "atol");
    o.sample_step = get(cfg, "solver", "sample_step");
    o.threads = static_cast<unsigned>(get(cfg, "solver", "threads"));
    return o;
}

numeric::MomentumGrid grid_of(const Json& cfg, const ApparatusSpec& a) {
    return numeric::default_grid(a, static_cast<std::size_t>(get(cfg, "grid", "momentum_points")),
                                 get(cfg, "grid", "p_extent"));
}

std::size_t work_points(const Json& cfg) { return static_cast<std::size_t>(get(cfg, "grid", "work_points")); }

// Flattened "section.key = value" lines for CSV headers.
void flatten(const Json& j, const std::string& where, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, where.empty() ? k : where + "." + k, out);
    } else if (j.is_number()) {
        out.emplace_back(where, num(j.get<double>()));
    } else if (j.is_string()) {
        out.emplace_back(where, j.get<std::string>());
    } else {
        out.emplace_back(where, j.dump());
    }
}

class Output {
public:
    Output(std::string command, const Json& cfg) : command_(std::move(command)), cfg_(cfg) {
        dir_ = cfg.at("output").at("dir").get<std::string>();
        prefix_ = cfg.at("output").at("prefix").get<std::string>();
        if (prefix_.empty()) prefix_ = command_;
        fs::create_directories(dir_);
    }

    std::string path(const std::string& suffix) const { return (fs::path(dir_) / (prefix_ + suffix)).string(); }

    void csv(const std::string& suffix, const std::vector<std::pair<std::string, std::string>>& meta,
             const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
        std::ostringstream os;
        os << "# qwork " << version() << "\n";
        os << "# command = " << command_ << "\n";
        os << "# units = kappa (energies in kappa, times in 1/kappa)\n";
        for (const auto& [k, v] : meta) os << "# " << k << " = " << v << "\n";
        std::vector<std::pair<std::string, std::string>> conf;
        flatten(cfg_, "config", conf);
        for (const auto& [k, v] : conf) os << "# " << k << " = " << v << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << num(row[c]);
            os << "\n";
        }
        write(suffix, os.str());
    }

    void json(const std::string& suffix, const Json& j) { write(suffix, j.dump(2) + "\n"); }

    void metadata(const Json& summary) {
        Json meta = {{"qwork_version", version()}, {"command", command_}, {"config", cfg_}, {"outputs", files_},
                     {"summary", summary}};
        write(".meta.json", meta.dump(2) + "\n");
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    // Written to a temporary name and renamed, so readers never see a
    // partial file.
    void write(const std::string& suffix, const std::string& content) {
        const std::string target = path(suffix);
        const std::string tmp = target + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
            out << content;
            if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
        }
        fs::rename(tmp, target);
        files_.push_back(fs::path(target).filename().string());
    }

    std::string command_;
    Json cfg_;
    std::string dir_;
    std::string prefix_;
    std::vector<std::string> files_;
};

std::vector<std::vector<double>> distribution_rows(const WorkDistribution& d) {
    std::vector<std::vector<double>> rows;
    rows.reserve(d.work.size());
    for (std::size_t k = 0; k < d.work.size(); ++k) rows.push_back({d.work[k], d.density[k]});
    return rows;
}

Json ledger_json(const thermo::WorkHeatLedger& l) {
    return {{"convention", thermo::to_string(l.convention)},
            {"work_interval", {l.work_iv.a, l.work_iv.b}},
            {"energy_interval", {l.energy_iv.a, l.energy_iv.b}},
            {"w_free", l.w_free},
            {"w_tilde", l.w_tilde},
            {"w_dist", l.w_dist},
            {"dU", l.du},
            {"dU_tilde", l.du_tilde},
            {"q", l.q},
            {"q_tilde", l.q_tilde},
            {"dW_int", l.dw_int},
            {"dW_povm", l.dw_povm},
            {"dQ_int", l.dq_int}};
}

Json matrix_json(const Eigen::MatrixXcd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

constexpr thermo::Convention kConventions[] = {thermo::Convention::split, thermo::Convention::window,
                                               thermo::Convention::protocol};

struct QubitPoint {
    numeric::QubitRun run;
    Eigen::Matrix2cd rho_ti;
};

QubitPoint run_qubit_point(const Json& cfg, double theta) {
    const auto s = schedule_of(cfg);
    const auto a = apparatus_of(cfg);
    const auto q = qubit_of(cfg, theta);
    const auto state = qubit_state_of(cfg);
    const auto grid = grid_of(cfg, a);
    const auto wg = numeric::qubit_work_grid(q, s, a, work_points(cfg));
    QubitPoint p{numeric::run_qubit(q, state, s, a, grid, wg, solver_of(cfg)), state.density()};
    p.run.distribution.check(kEmitCoverage);
    const auto& tr = p.run.trajectory;
    for (const auto& [what, drift] : {std::pair{"grid norm drift", tr.norm_drift}, std::pair{"per-point norm drift", tr.max_point_drift}}) {
        if (drift > kNormDriftLimit) {
            std::ostringstream os;
            os << "theta = " << theta << ": " << what << " " << drift << " exceeds " << kNormDriftLimit;
            throw numerical_error(os.str());
        }
    }
    return p;
}

RunResult run_qubit_command(const Json& cfg, Output& out) {
    const auto s = schedule_of(cfg);
    const auto thetas = thetas_of(cfg);
    Json points = Json::array();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double theta = thetas[i];
        const auto q = qubit_of(cfg, theta);
        const QubitPoint p = run_qubit_point(cfg, theta);
        const auto& d = p.run.distribution;
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_theta%02zu.csv", i);
        std::vector<std::pair<std::string, std::string>> meta = {
            {"engine", d.engine},
            {"theta", num(theta)},
            {"time", num(d.time)},
            {"norm_drift", num(p.run.trajectory.norm_drift)},
            {"max_point_drift", num(p.run.trajectory.max_point_drift)},
            {"integral", num(d.integral())}};
        for (const auto& w : d.warnings) meta.emplace_back("warning", w);
        out.csv(suffix, meta, {"W_over_kappa", "density"}, distribution_rows(d));

        Json ledgers = Json::object();
        for (auto c : kConventions) ledgers[thermo::to_string(c)] = ledger_json(thermo::qubit_ledger(q, p.rho_ti, s, p.run, c));
        points.push_back({{"theta", theta},
                          {"file", out.files().back()},
                          {"integral", d.integral()},
                          {"mean", d.mean()},
                          {"norm_drift", p.run.trajectory.norm_drift},
                          {"max_point_drift", p.run.trajectory.max_point_drift},
                          {"rk_steps", p.run.trajectory.steps},
                          {"rho_tilde_tm", matrix_json(Eigen::MatrixXcd(p.run.trajectory.rho.back()))},
                          {"warnings", d.warnings},
                          {"ledger", ledgers}});
    }
    Json summary = {{"points", points}};
    out.json("_report.json", summary);
    return {{}, summary, true};
}

RunResult run_analytic_command(const Json& cfg, Output& out) {
    const auto s = schedule_of(cfg);
    const auto a = apparatus_of(cfg);
    const auto sys = spectral_of(cfg);
    sys.validate(s);
    const analytic::ThermalSpec th{get(cfg, "thermal", "beta")};
    const bool thermal = cfg.at("analytic").at("weights") == "thermal";
    double t = get(cfg, "analytic", "time");
    if (t < 0.0) t = s.t_m;
    if (t < s.t_p || t > s.t_m) throw config_error("analytic.time: must lie in [t_p, t_m] (or be negative for t_m)");

    std::vector<double> weights;
    if (thermal) {
        weights = analytic::gibbs_weights(sys, th, s.t_i);
    } else {
        weights = numbers(cfg.at("state").at("populations"));
        if (weights.size() != sys.dimension())
            throw config_error("state.populations: expected " + std::to_string(sys.dimension()) + " entries");
    }
    const auto centers = analytic::work_centers(sys, s);
    const double sigma = sigma_width(a, t, s.t_p);
    const auto wg = default_work_grid(centers, sigma, work_points(cfg));
    const auto dist = analytic::work_distribution(sys, weights, s, a, t, wg);
    dist.check(kEmitCoverage);
    out.csv("_distribution.csv", {{"engine", dist.engine}, {"time", num(t)}, {"weights", thermal ? "thermal" : "populations"},
                                  {"integral", num(dist.integral())}},
            {"W_over_kappa", "density"}, distribution_rows(dist));

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(weights.size()),
                                                  static_cast<Eigen::Index>(weights.size()));
    for (std::size_t n = 0; n < weights.size(); ++n) rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = weights[n];
    Json ledgers = Json::object();
    for (auto c : kConventions) ledgers[thermo::to_string(c)] = ledger_json(thermo::spectral_ledger(sys, rho, s, a, c));

    Json summary = {{"time", t},
                    {"sigma", sigma},
                    {"centers", centers},
                    {"weights", weights},
                    {"average_work_dist", analytic::average_work_dist(sys, weights, s)},
                    {"delta_w_povm", analytic::delta_w_povm(sys, weights, s)},
                    {"ledger", ledgers}};

    if (thermal) {
        const auto at_tm = analytic::thermal_work_distribution(
            sys, th, s, a, s.t_m, default_work_grid(centers, sigma_width(a, s.t_m, s.t_p), work_points(cfg)));
        const double closed = analytic::modified_jarzynski(sys, th, s, a);
        const auto quad = oracle::quadrature_expectation(at_tm, oracle::Weight::boltzmann, th.beta, kEmitCoverage);
        const auto bound = analytic::second_law_bound(sys, th, s, a);
        const double z_ratio = std::exp(analytic::log_partition_function(sys, th, s.t_f) -
                                        analytic::log_partition_function(sys, th, s.t_i));
        const double df = analytic::free_energy_change(sys, th, s);
        summary["jarzynski"] = {{"closed_form", closed}, {"quadrature", quad.value},
                                {"quadrature_error", quad.error}, {"z_ratio", z_ratio}};
        summary["free_energy_change"] = df;
        summary["second_law"] = {{"lhs", bound.lhs}, {"rhs", bound.rhs}, {"correction", bound.correction},
                                 {"holds", bound.holds()}};

        const auto n = static_cast<std::size_t>(get(cfg, "analytic", "crooks_points"));
        const auto [lo, hi] = std::minmax_element(centers.begin(), centers.end());
        const auto ws = n == 1 ? std::vector<double>{0.5 * (*lo + *hi)} : linspace(*lo - 2 * sigma, *hi + 2 * sigma, n);
        const analytic::CrooksPair pair{s, t};
        std::vector<std::vector<double>> rows;
        for (double w : ws)
            rows.push_back({w, analytic::crooks_ratio(sys, th, pair, a, w), std::exp(th.beta * (w - df))});
        out.csv("_crooks.csv", {{"time", num(t)}, {"backward_time", num(pair.backward_time())}},
                {"W_over_kappa", "crooks_ratio", "ideal_ratio"}, rows);
    }
    out.json("_report.json", summary);
    return {{}, summary, true};
}

RunResult run_sweep_command(const Json& cfg, Output& out) {
    const auto s = schedule_of(cfg);
    if (cfg.at("sweep").at("kind") == "theta") {
        const auto conv = thermo::convention_from_string(cfg.at("ledger").at("convention"));
        std::vector<std::vector<double>> rows;
        Json points = Json::array();
        for (double theta : numbers(cfg.at("sweep").at("thetas"))) {
            const QubitPoint p = run_qubit_point(cfg, theta);
            const auto l = thermo::qubit_ledger(qubit_of(cfg, theta), p.rho_ti, s, p.run, conv);
            rows.push_back({theta, l.dw_int, l.dw_povm, l.dq_int});
            points.push_back({{"theta", theta}, {"ledger", ledger_json(l)}, {"norm_drift", p.run.trajectory.norm_drift}});
        }
        out.csv("_sweep.csv", {{"ledger_convention", thermo::to_string(conv)}}, {"theta", "dW_int", "dW_povm", "dQ_int"},
                rows);
        Json summary = {{"kind", "theta"}, {"points", points}};
        out.json("_report.json", summary);
        return {{}, summary, true};
    }

    const auto a = apparatus_of(cfg);
    const auto sys = spectral_of(cfg);
    sys.validate(s);
    const analytic::ThermalSpec th{get(cfg, "thermal", "beta")};
    oracle::LadderSpec spec{s, a, numbers(cfg.at("sweep").at("scales"))};
    const double df = analytic::free_energy_change(sys, th, s);
    const double z_ratio = std::exp(analytic::log_partition_function(sys, th, s.t_f) -
                                    analytic::log_partition_function(sys, th, s.t_i));
    std::vector<double> atoms;
    for (std::size_t n = 0; n < sys.dimension(); ++n) atoms.push_back(sys.energy(n, s.t_f) - sys.energy(n, s.t_i));
    const auto weights = analytic::gibbs_weights(sys, th, s.t_i);

    std::vector<std::vector<double>> rows;
    for (const auto& r : spec.rungs()) {
        const double jarz = std::abs(analytic::modified_jarzynski(sys, th, r.schedule, r.apparatus) - z_ratio);
        const double povm = analytic::delta_w_povm(sys, weights, r.schedule);
        double crooks = 0.0;
        for (double w : atoms) {
            const double ratio = analytic::crooks_ratio(sys, th, {r.schedule, r.schedule.t_m}, r.apparatus, w);
            crooks = std::max(crooks, std::abs(ratio / std::exp(th.beta * (w - df)) - 1.0));
        }
        const double gap = analytic::second_law_bound(sys, th, r.schedule, r.apparatus).rhs - df;
        rows.push_back({r.scale, r.schedule.delta, r.apparatus.sigma_p, r.apparatus.mass, jarz, povm, crooks, gap});
    }
    out.csv("_ideal.csv", {{"beta", num(th.beta)}, {"z_ratio", num(z_ratio)}, {"free_energy_change", num(df)}},
            {"scale", "delta", "sigma_p", "mass", "jarzynski_error", "dW_povm", "crooks_max_rel_error",
             "bound_minus_dF"},
            rows);
    Json summary = {{"kind", "ideal"}, {"rungs", rows.size()}};
    return {{}, summary, true};
}

struct Check {
    std::string name;
    double value;
    double tolerance;
    bool passed;
};

RunResult run_verify_command(const Json& cfg, Output& out) {
    std::vector<Check> checks;
    auto add = [&](std::string name, double value, double tol) {
        checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
    };
    const auto s = schedule_of(cfg);
    const auto a = apparatus_of(cfg);
    const auto sys = spectral_of(cfg);
    sys.validate(s);

    // Cross-engine agreement for the commuting qubit.
    {
        const DrivenQubit q = qubit_of(cfg, 0.0);
        const double r = 1.0 / std::sqrt(2.0);
        const auto grid = grid_of(cfg, a);
        const auto wg = numeric::qubit_work_grid(q, s, a, work_points(cfg));
        const auto run = numeric::run_qubit(q, SystemState::qubit(r, r), s, a, grid, wg, solver_of(cfg));
        const auto commuting = SpectralSystem::polynomial({{0.0, q.kappa * q.kappa}, {0.0, -q.kappa * q.kappa}});
        const auto ref = analytic::work_distribution(commuting, {0.5, 0.5}, s, a, s.t_m, wg);
        double linf = 0.0;
        for (std::size_t k = 0; k < wg.size(); ++k)
            linf = std::max(linf, std::abs(ref.density[k] - run.distribution.density[k]));
        add("cross_engine_linf", linf, 1e-4);
        add("norm_drift", run.trajectory.norm_drift, kNormDriftLimit);
        add("per_point_norm_drift", run.trajectory.max_point_drift, kNormDriftLimit);
        add("numeric_normalization", std::abs(run.distribution.integral() - 1.0), kEmitCoverage);
    }

    const auto centers = analytic::work_centers(sys, s);
    const auto wg = default_work_grid(centers, sigma_width(a, s.t_m, s.t_p), work_points(cfg));
    double jarz = 0.0;
    double crooks = 0.0;
    double second = 0.0;
    for (double beta : {0.1, 1.0, 5.0}) {
        const analytic::ThermalSpec th{beta};
        const auto dist = analytic::thermal_work_distribution(sys, th, s, a, s.t_m, wg);
        const double closed = analytic::modified_jarzynski(sys, th, s, a);
        const double quad = oracle::quadrature_expectation(dist, oracle::Weight::boltzmann, beta).value;
        jarz = std::max(jarz, std::abs(quad / closed - 1.0));

        // Ratio of the two thermal mixtures at mirrored times.
        const analytic::CrooksPair pair{s, s.t_m};
        const auto wf = analytic::gibbs_weights(sys, th, s.t_i);
        const auto wb = analytic::gibbs_weights(sys, th, s.t_f);
        std::vector<double> back_centers;
        for (double c : centers) back_centers.push_back(-c);
        const double sf = sigma_width(a, pair.t, s.t_p);
        const double sb = sigma_width(a, pair.backward_time(), s.t_p);
        const auto [lo, hi] = std::minmax_element(centers.begin(), centers.end());
        for (double w : linspace(*lo - sf, *hi + sf, 20)) {
            const double direct = analytic::mixture_density(wf, centers, sf, w) /
                                  analytic::mixture_density(wb, back_centers, sb, -w);
            crooks = std::max(crooks, std::abs(analytic::crooks_ratio(sys, th, pair, a, w) / direct - 1.0));
        }
        const auto bound = analytic::second_law_bound(sys, th, s, a);
        second = std::max(second, bound.rhs - bound.lhs);
    }
    add("jarzynski_closed_vs_quadrature", jarz, 1e-8);
    add("crooks_vs_mixtures", crooks, 1e-8);
    add("second_law_violation", std::max(0.0, second), 1e-10);

    {
        double stochastic = 0.0;
        for (double theta : thetas_of(cfg)) {
            const auto p = oracle::transition_matrix(qubit_of(cfg, theta), s);
            stochastic = std::max(stochastic, (p.rowwise().sum().array() - 1.0).abs().maxCoeff());
            stochastic = std::max(stochastic, (p.colwise().sum().array() - 1.0).abs().maxCoeff());
        }
        add("tmp_doubly_stochastic", stochastic, 1e-12);
    }
    {
        const DrivenQubit q = qubit_of(cfg, std::numbers::pi / 2);
        const auto povm = oracle::povm_effects_qubit(q, s, a, grid_of(cfg, a),
                                                     numeric::qubit_work_grid(q, s, a, work_points(cfg)), solver_of(cfg));
        add("povm_completeness", (povm.completeness() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-4);
    }
    {
        const std::size_t n = sys.dimension();
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                                          cdouble(0.3 / static_cast<double>(n), 0.0));
        rho.diagonal().setConstant(1.0 / static_cast<double>(n));
        const auto l = thermo::spectral_ledger(sys, rho, s, a, thermo::Convention::split);
        add("self_commuting_dW_int", std::abs(l.dw_int), 1e-8);
        add("self_commuting_dQ_int", std::abs(l.dq_int), 1e-8);
        std::vector<double> pops(n, 1.0 / static_cast<double>(n));
        add("dW_povm_closed_form", std::abs(l.dw_povm - analytic::delta_w_povm(sys, pops, s)), 1e-8);
    }

    bool ok = true;
    Json list = Json::array();
    for (const auto& c : checks) {
        ok = ok && c.passed;
        list.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    }
    Json summary = {{"checks", list}, {"passed", ok}};
    out.json("_verify.json", summary);
    return {{}, summary, ok};
}

}  // namespace

RunResult run(const std::string& command, const Json& cfg) {
    validate_config(command, cfg);
    Output out(command, cfg);
    RunResult r;
    if (command == "analytic") r = run_analytic_command(cfg, out);
    else if (command == "qubit") r = run_qubit_command(cfg, out);
    else if (command == "sweep") r = run_sweep_command(cfg, out);
    else r = run_verify_command(cfg, out);
    out.metadata(r.summary);
    r.files = out.files();
    return r;
}

}  // namespace qwork::cli
