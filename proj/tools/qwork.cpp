#include "qwork/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    namespace qc = qwork::cli;
    CLI::App app{"Measured quantum work: analytic and numeric engines, thermodynamic ledgers, oracles"};
    app.set_version_flag("--version", qc::version());
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string replay_path;
    bool dump_config = false;

    const std::pair<const char*, const char*> commands[] = {
        {"analytic", "closed-form distribution, Jarzynski, Crooks and ledgers for a spectral system"},
        {"qubit", "numeric momentum-grid runs of the driven qubit, one per theta"},
        {"sweep", "theta sweep of the qubit ledger, or an ideal-limit ladder"},
        {"verify", "compact oracle suite; exit code 3 on any failing check"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "TOML configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", overrides, "override one key, e.g. --set qubit.theta=1.5707963");
        sub->add_option("--replay", replay_path, "rerun from a .meta.json sidecar")->check(CLI::ExistingFile);
        sub->add_flag("--print-config", dump_config, "print the resolved configuration and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? qc::kExitOk : qc::kExitConfig;
    }

    try {
        std::string command = app.get_subcommands().front()->get_name();
        qc::Json cfg = qc::default_config();
        if (!replay_path.empty()) {
            auto [replayed, replay_cfg] = qc::load_replay(replay_path);
            if (replayed != command)
                throw qc::config_error("--replay: metadata was written by '" + replayed + "', not '" + command + "'");
            cfg = std::move(replay_cfg);
        }
        if (!config_path.empty()) qc::merge_config(cfg, qc::load_toml_file(config_path));
        for (const auto& o : overrides) qc::apply_override(cfg, o);
        qc::validate_config(command, cfg);
        if (dump_config) {
            std::cout << cfg.dump(2) << "\n";
            return qc::kExitOk;
        }
        const auto result = qc::run(command, cfg);
        for (const auto& f : result.files) std::cout << f << "\n";
        if (!result.passed) {
            std::cerr << "qwork: verification failed\n";
            for (const auto& c : result.summary.at("checks"))
                if (!c.at("passed").get<bool>())
                    std::cerr << "  " << c.at("name").get<std::string>() << ": " << c.at("value").get<double>()
                              << " > " << c.at("tolerance").get<double>() << "\n";
            return qc::kExitNumerical;
        }
        return qc::kExitOk;
    } catch (...) {
        return qc::report_exception();
    }
}
