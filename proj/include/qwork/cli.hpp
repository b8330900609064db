// cli.hpp: config-driven experiment runner behind the `qwork` tool.
//
// A configuration is a JSON tree with the same shape as the TOML file. Every
// key has a default (the figure parameter set); files and `--set key=value`
// overrides are merged on top and may only name keys that already exist.

#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace qwork::cli {

using Json = nlohmann::json;

// Invalid configuration (exit code 2).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

std::string version();

Json default_config();
Json parse_toml(const std::string& text, const std::string& source = "<string>");
Json load_toml_file(const std::string& path);

// Recursive merge; unknown keys and type changes raise config_error.
void merge_config(Json& base, const Json& patch, const std::string& where = "");
// "section.key=value", value parsed as a TOML value (bare words as strings).
void apply_override(Json& cfg, const std::string& assignment);

// Full validation of a resolved configuration for one command.
void validate_config(const std::string& command, const Json& cfg);

struct RunResult {
    std::vector<std::string> files;  // written artifacts, metadata last
    Json summary;
    bool passed{true};  // false when `verify` found a failing check
};

// Runs "analytic", "qubit", "sweep" or "verify". Throws config_error,
// std::invalid_argument or qwork::numerical_error.
RunResult run(const std::string& command, const Json& cfg);

// Reads a metadata sidecar and returns {command, config}.
std::pair<std::string, Json> load_replay(const std::string& path);

// Maps the exception in flight to an exit code and prints it to stderr.
int report_exception();

}  // namespace qwork::cli
