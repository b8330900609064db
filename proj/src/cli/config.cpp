#include "qwork/cli.hpp"

#include "qwork/core.hpp"
#include "qwork/thermo.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace qwork::cli {

namespace {

Json from_toml(const toml::node& node, const std::string& where) {
    if (const auto* t = node.as_table()) {
        Json out = Json::object();
        for (const auto& [k, v] : *t) {
            const std::string key(k.str());
            out[key] = from_toml(v, where.empty() ? key : where + "." + key);
        }
        return out;
    }
    if (const auto* a = node.as_array()) {
        Json out = Json::array();
        for (const auto& v : *a) out.push_back(from_toml(v, where + "[]"));
        return out;
    }
    if (const auto* v = node.as_integer()) return static_cast<double>(v->get());
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    if (const auto* v = node.as_string()) return v->get();
    throw config_error(where + ": dates and times are not supported");
}

std::string type_name(const Json& j) {
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    if (j.is_boolean()) return "boolean";
    if (j.is_array()) return "array";
    if (j.is_object()) return "table";
    return "null";
}

const Json& at(const Json& cfg, const std::string& section, const std::string& key) {
    return cfg.at(section).at(key);
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw config_error(field + ": " + message);
}

void check_number_array(const Json& a, const std::string& field) {
    require(a.is_array(), field, "expected an array");
    for (const auto& v : a) require(v.is_number() && std::isfinite(v.get<double>()), field, "expected finite numbers");
}

// Runs a core validate() and re-labels its message with the section name.
template <class F>
void section(const std::string& name, F&& f) {
    try {
        f();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        throw config_error(msg.rfind(name + ":", 0) == 0 ? msg : name + ": " + msg);
    }
}

}  // namespace

std::string version() { return QWORK_VERSION; }

Json default_config() {
    const double r = 1.0 / std::sqrt(2.0);
    const double pi = std::numbers::pi;
    return Json{
        {"schedule", {{"t_p", 0.0}, {"t_i", 2.0}, {"t_f", 3.0}, {"t_m", 4.0}, {"delta", 0.2}}},
        {"apparatus", {{"mass", 1000.0}, {"sigma_p", 1.0}, {"lambda", 1.0}}},
        {"qubit", {{"kappa", 1.0}, {"omega", 1.0}, {"theta", 0.0}, {"thetas", Json::array()}}},
        // superposition: α|0⟩ + β|1⟩ at t_i, as [re, im] pairs; mixture: diagonal populations
        {"state",
         {{"kind", "superposition"},
          {"alpha", {r, 0.0}},
          {"beta", {r, 0.0}},
          {"populations", {0.5, 0.5}}}},
        {"spectral", {{"energies", Json::array({Json::array({0.0, 1.0}), Json::array({0.0, -1.0})})}}},
        {"thermal", {{"beta", 1.0}}},
        {"analytic", {{"weights", "thermal"}, {"time", -1.0}, {"crooks_points", 20.0}}},
        {"grid", {{"momentum_points", 4096.0}, {"p_extent", 8.0}, {"work_points", 4096.0}}},
        {"solver", {{"rtol", 1e-10}, {"atol", 1e-12}, {"sample_step", 0.0}, {"threads", 1.0}}},
        {"ledger", {{"convention", "split"}}},
        {"sweep",
         {{"kind", "theta"},
          {"thetas", {0.0, pi / 8, pi / 4, 3 * pi / 8, pi / 2, 5 * pi / 8, 3 * pi / 4, 7 * pi / 8, pi}},
          {"scales", {1.0, 0.5, 0.25}}}},
        {"output", {{"dir", "qwork-out"}, {"prefix", ""}}},
    };
}

Json parse_toml(const std::string& text, const std::string& source) {
    try {
        const toml::table t = toml::parse(text, source);
        return from_toml(t, "");
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
        throw config_error(os.str());
    }
}

Json load_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str(), path);
}

void merge_config(Json& base, const Json& patch, const std::string& where) {
    if (!patch.is_object()) throw config_error((where.empty() ? "config" : where) + ": expected a table");
    for (const auto& [key, value] : patch.items()) {
        const std::string field = where.empty() ? key : where + "." + key;
        if (!base.contains(key)) throw config_error("unknown key '" + field + "'");
        Json& slot = base[key];
        if (slot.is_object()) {
            merge_config(slot, value, field);
        } else if (type_name(slot) != type_name(value)) {
            throw config_error(field + ": expected " + type_name(slot) + ", got " + type_name(value));
        } else {
            slot = value;
        }
    }
}

void apply_override(Json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw config_error("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value;
    try {
        const toml::table t = toml::parse("v = " + raw);
        value = from_toml(*t.get("v"), key);
    } catch (const toml::parse_error&) {
        value = raw;
    }
    Json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t dot; (dot = rest.find('.')) != std::string::npos; rest = rest.substr(dot + 1))
        parts.push_back(rest.substr(0, dot));
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
    merge_config(cfg, patch);
}

void validate_config(const std::string& command, const Json& cfg) {
    section("schedule", [&] {
        ProtocolSchedule s{at(cfg, "schedule", "t_p"), at(cfg, "schedule", "t_i"), at(cfg, "schedule", "t_f"),
                           at(cfg, "schedule", "t_m"), at(cfg, "schedule", "delta")};
        s.validate();
    });
    section("apparatus", [&] {
        ApparatusSpec a{at(cfg, "apparatus", "mass"), at(cfg, "apparatus", "sigma_p"), at(cfg, "apparatus", "lambda")};
        a.validate();
    });
    section("qubit", [&] {
        DrivenQubit q{at(cfg, "qubit", "kappa"), at(cfg, "qubit", "omega"), at(cfg, "qubit", "theta")};
        q.validate();
        check_number_array(at(cfg, "qubit", "thetas"), "qubit.thetas");
        for (const auto& t : at(cfg, "qubit", "thetas")) DrivenQubit{q.kappa, q.omega, t.get<double>()}.validate();
    });

    const std::string kind = at(cfg, "state", "kind");
    require(kind == "superposition" || kind == "mixture", "state.kind", "expected 'superposition' or 'mixture'");
    for (const char* k : {"alpha", "beta"}) {
        const Json& v = at(cfg, "state", k);
        check_number_array(v, std::string("state.") + k);
        require(v.size() == 2, std::string("state.") + k, "expected [re, im]");
    }
    check_number_array(at(cfg, "state", "populations"), "state.populations");

    const Json& energies = at(cfg, "spectral", "energies");
    require(energies.is_array() && !energies.empty(), "spectral.energies", "expected a non-empty array of arrays");
    for (const auto& e : energies) {
        check_number_array(e, "spectral.energies");
        require(!e.empty(), "spectral.energies", "every level needs at least one coefficient");
    }

    section("thermal", [&] {
        const double beta = at(cfg, "thermal", "beta");
        require(std::isfinite(beta) && beta >= 0.0, "thermal.beta", "must be finite and >= 0");
    });
    const std::string weights = at(cfg, "analytic", "weights");
    require(weights == "thermal" || weights == "populations", "analytic.weights",
            "expected 'thermal' or 'populations'");
    require(at(cfg, "analytic", "crooks_points").get<double>() >= 1.0, "analytic.crooks_points", "must be >= 1");

    for (const char* k : {"momentum_points", "work_points"}) {
        const double n = at(cfg, "grid", k);
        require(n >= 3.0 && n == std::floor(n), std::string("grid.") + k, "must be an integer >= 3");
    }
    require(at(cfg, "grid", "p_extent").get<double>() >= 6.0, "grid.p_extent", "must be >= 6 (sigma_p units)");

    const double rtol = at(cfg, "solver", "rtol");
    const double atol = at(cfg, "solver", "atol");
    require(rtol > 0.0 && rtol < 1.0, "solver.rtol", "must lie in (0, 1)");
    require(atol > 0.0, "solver.atol", "must be > 0");
    require(at(cfg, "solver", "sample_step").get<double>() >= 0.0, "solver.sample_step", "must be >= 0");
    const double threads = at(cfg, "solver", "threads");
    require(threads >= 1.0 && threads == std::floor(threads), "solver.threads", "must be an integer >= 1");

    section("ledger", [&] { thermo::convention_from_string(at(cfg, "ledger", "convention")); });

    const std::string sweep_kind = at(cfg, "sweep", "kind");
    require(sweep_kind == "theta" || sweep_kind == "ideal", "sweep.kind", "expected 'theta' or 'ideal'");
    check_number_array(at(cfg, "sweep", "thetas"), "sweep.thetas");
    check_number_array(at(cfg, "sweep", "scales"), "sweep.scales");
    for (const auto& s : at(cfg, "sweep", "scales")) require(s.get<double>() > 0.0, "sweep.scales", "must be > 0");
    if (command == "sweep") {
        if (sweep_kind == "theta") require(!at(cfg, "sweep", "thetas").empty(), "sweep.thetas", "must not be empty");
        if (sweep_kind == "ideal")
            require(at(cfg, "sweep", "scales").size() >= 3, "sweep.scales", "an ideal-limit ladder needs >= 3 rungs");
    }
    require(!at(cfg, "output", "dir").get<std::string>().empty(), "output.dir", "must not be empty");

    if (command != "analytic" && command != "qubit" && command != "sweep" && command != "verify")
        throw config_error("unknown command '" + command + "'");
}

std::pair<std::string, Json> load_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read metadata file '" + path + "'");
    Json meta;
    try {
        in >> meta;
    } catch (const Json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    if (!meta.contains("command") || !meta.contains("config"))
        throw config_error(path + ": not a qwork metadata file (needs 'command' and 'config')");
    Json cfg = default_config();
    merge_config(cfg, meta.at("config"));
    return {meta.at("command").get<std::string>(), cfg};
}

int report_exception() {
    try {
        throw;
    } catch (const config_error& e) {
        std::cerr << "qwork: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qwork: invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const numerical_error& e) {
        std::cerr << "qwork: numerical tolerance failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Json::exception& e) {
        std::cerr << "qwork: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "qwork: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace qwork::cli
