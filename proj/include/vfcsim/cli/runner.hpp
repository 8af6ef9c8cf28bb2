#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vfcsim::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse + validate a scenario config. Unknown keys fail with the path to the
// offending field; the seed default is injected so the resolved config is
// self-contained.
json load_config(const std::string& path);
json validate_config(json config);

// Apply a `--set key.path=value` override; value parses as JSON when possible.
void apply_override(json& config, const std::string& assignment);

struct RunOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;        // overrides config output_dir when set
    std::int64_t seed = -1;     // overrides config seed when >= 0
    std::string variant;        // analytic mode: corrected | as_written
};

// Executes one scenario; writes reports plus resolved_config.json.
// Returns the process exit code.
int run(const RunOptions& options);

// Independent runs along one config axis; run i uses seed ^ i and writes to
// <out>/sweep_<i>; a merged summary.csv lands in <out>.
int sweep(const RunOptions& options, const std::string& axis,
          const std::vector<std::string>& values);

// exposed for tests: executes an already-validated config
int run_resolved(const json& config, const std::string& out_dir);

}  // namespace vfcsim::cli
