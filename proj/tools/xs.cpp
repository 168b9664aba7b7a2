#include "xs/commands.hpp"
#include "xs/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"xs: equilibrium measures, biorthogonal systems and kernel limits at high precision"};
    app.require_subcommand(1, 1);
    xs::CliOptions opt;
    int digits = 0, jobs = 1;
    std::string out, cache;
    for (const char* name : {"equilibrium", "biortho", "universality", "diagnostics", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "JSON run configuration");
        sub->add_option("--digits", digits, "override the configured precision (>= 32)");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--cache", cache, "cache directory");
        sub->add_option("--jobs", jobs, "worker processes")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(xs::ExitCode::validation);
    }
    opt.command = app.get_subcommands().front()->get_name();
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--digits")) opt.digits = digits;
    if (sub->count("--out")) opt.out_dir = out;
    if (sub->count("--cache")) opt.cache_dir = cache;
    opt.jobs = jobs;

    try {
        return xs::run_command(opt, std::cerr);
    } catch (const xs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(xs::ExitCode::io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(xs::ExitCode::numerical);
    }
}
