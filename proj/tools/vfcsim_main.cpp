#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vfcsim/cli/runner.hpp"

namespace {

// --sweep key=v1,v2,... -> (key, {v1, v2, ...})
bool split_sweep(const std::string& arg, std::string& axis,
                 std::vector<std::string>& values) {
    auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    axis = arg.substr(0, eq);
    std::string rest = arg.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        auto comma = rest.find(',', start);
        std::string part = rest.substr(start, comma - start);
        if (!part.empty()) values.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return !values.empty();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vfcsim: vehicular fog dissemination and handoff experiments"};

    vfcsim::cli::RunOptions options;
    std::string sweep_arg;

    app.add_option("--config", options.config_path, "scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--seed", options.seed, "override the config seed");
    app.add_option("--set", options.overrides,
                   "key.path=value config override (repeatable)");
    app.add_option("--out", options.out_dir, "output directory");
    app.add_option("--sweep", sweep_arg, "key=v1,v2,... one run per value");
    app.add_option("--variant", options.variant, "analytic formula variant")
        ->check(CLI::IsMember({"as_written", "corrected"}));

    CLI11_PARSE(app, argc, argv);

    if (!sweep_arg.empty()) {
        std::string axis;
        std::vector<std::string> values;
        if (!split_sweep(sweep_arg, axis, values)) {
            std::fprintf(stderr, "error: --sweep expects key=v1,v2,...\n");
            return 1;
        }
        return vfcsim::cli::sweep(options, axis, values);
    }
    return vfcsim::cli::run(options);
}
