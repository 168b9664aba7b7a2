#pragma once

#include "xs/biortho.hpp"
#include "xs/config.hpp"
#include "xs/equilibrium.hpp"
#include "xs/errors.hpp"
#include "xs/report.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xs {

struct CliOptions {
    std::string command;  // equilibrium | biortho | universality | diagnostics | verify
    std::string config_path;
    std::optional<int> digits;
    std::optional<std::string> out_dir, cache_dir;
    int jobs = 1;
};

// config file plus flag overrides, validated
RunConfig resolve_config(const CliOptions& opt);

// Runs tasks in order, or in up to `jobs` forked workers. Results come back in task order; on the
// first failure the remaining tasks are not started and the error is returned alongside whatever
// finished.
struct TaskRun {
    std::vector<std::optional<TaskOutput>> outputs;
    std::optional<ExitCode> error_code;
    std::string error_message;
};
TaskRun run_tasks(const std::vector<std::function<TaskOutput()>>& tasks, int jobs, const std::string& scratch_dir,
                  std::ostream& log);

// cache-aware builders; with an empty cache_dir they just compute
Equilibrium cached_equilibrium(const RunConfig& cfg, const std::string& t_text, int digits);
BiorthoSystem cached_system(const RunConfig& cfg, const Potential& V, int n, int m, int digits);

// precision used for the biorthogonal system of size n
int system_digits(const RunConfig& cfg, int n);

// Writes <out>/<command>.csv (and extra tables) and <out>/<command>_summary.json.
// Returns the process exit code.
int run_command(const CliOptions& opt, std::ostream& log);

}  // namespace xs
