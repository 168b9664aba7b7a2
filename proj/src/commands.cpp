#include "xs/commands.hpp"

#include "xs/diagnostics.hpp"
#include "xs/errors.hpp"
#include "xs/kernel.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

namespace xs {

namespace fs = std::filesystem;
using boost::multiprecision::abs;

RunConfig resolve_config(const CliOptions& opt) {
    RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
    if (opt.digits) cfg.digits = *opt.digits;
    if (opt.out_dir) cfg.output_dir = *opt.out_dir;
    if (opt.cache_dir) cfg.cache_dir = *opt.cache_dir;
    if (opt.jobs < 1) throw ValidationError("--jobs must be at least 1");
    cfg.validate();
    return cfg;
}

int system_digits(const RunConfig& cfg, int n) { return std::max(cfg.digits, default_biortho_digits(n)); }

namespace {

void ensure_dir(const std::string& d) {
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw IoError("cannot create directory " + d + ": " + ec.message());
}

std::string cache_file(const RunConfig& cfg, const std::string& kind, const std::string& key) {
    ensure_dir(cfg.cache_dir);
    return (fs::path(cfg.cache_dir) / (kind + "-" + fnv1a_hex(key) + ".json")).string();
}

}  // namespace

Equilibrium cached_equilibrium(const RunConfig& cfg, const std::string& t_text, int digits) {
    ScopedPrecision g(digits);
    const auto ctx = PrecisionContext::with_digits(digits);
    const Potential V = cfg.make_potential(digits);
    if (cfg.cache_dir.empty()) return solve_equilibrium(V, from_decimal(t_text, digits), ctx);
    const std::string path = cache_file(cfg, "equilibrium", equilibrium_cache_key(V, t_text, digits));
    if (auto e = load_equilibrium(path, V, t_text, ctx)) return std::move(*e);
    Equilibrium e = solve_equilibrium(V, from_decimal(t_text, digits), ctx);
    save_equilibrium(path, e, t_text);
    // hand back what a warm run would see, so cold and warm output agree
    if (auto back = load_equilibrium(path, V, t_text, ctx)) return std::move(*back);
    throw IoError("equilibrium cache " + path + " did not read back");
}

BiorthoSystem cached_system(const RunConfig& cfg, const Potential& V, int n, int m, int digits) {
    ScopedPrecision g(digits);
    const auto ctx = PrecisionContext::with_digits(digits);
    const Potential Vd = V.at(digits);
    if (cfg.cache_dir.empty()) return construct(Vd, n, m, ctx);
    const std::string path = cache_file(cfg, "biortho", biortho_cache_key(Vd, n, m, digits));
    if (auto s = load_biortho(path, Vd, n, m, ctx)) return std::move(*s);
    BiorthoSystem s = construct(Vd, n, m, ctx);
    save_biortho(path, s);
    if (auto back = load_biortho(path, Vd, n, m, ctx)) return std::move(*back);
    throw IoError("biortho cache " + path + " did not read back");
}

TaskRun run_tasks(const std::vector<std::function<TaskOutput()>>& tasks, int jobs, const std::string& scratch_dir,
                  std::ostream& log) {
    TaskRun run;
    run.outputs.resize(tasks.size());
    if (jobs <= 1 || tasks.size() <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) {
            try {
                run.outputs[i] = tasks[i]();
            } catch (const Error& e) {
                run.error_code = e.code();
                run.error_message = e.what();
                break;
            }
        }
        return run;
    }

    // one process per task, at most `jobs` alive; results travel through files in scratch_dir
    ensure_dir(scratch_dir);
    auto part = [&](size_t i) { return (fs::path(scratch_dir) / (".task-" + std::to_string(i) + ".json")).string(); };
    std::map<pid_t, size_t> alive;
    size_t next = 0;
    bool stop = false;
    std::map<size_t, std::pair<ExitCode, std::string>> failures;
    log.flush();
    while (!alive.empty() || (!stop && next < tasks.size())) {
        while (!stop && next < tasks.size() && static_cast<int>(alive.size()) < jobs) {
            const size_t i = next++;
            pid_t pid = fork();
            if (pid < 0) throw IoError("fork failed");
            if (pid == 0) {
                nlohmann::json j;
                int code = 0;
                try {
                    j = tasks[i]().to_json();
                } catch (const Error& e) {
                    code = static_cast<int>(e.code());
                    j = {{"error", e.what()}, {"code", code}};
                } catch (const std::exception& e) {
                    code = static_cast<int>(ExitCode::numerical);
                    j = {{"error", e.what()}, {"code", code}};
                }
                std::ofstream(part(i)) << j.dump();
                std::fflush(nullptr);
                _exit(code);
            }
            alive[pid] = i;
        }
        int status = 0;
        pid_t pid = waitpid(-1, &status, 0);
        if (pid < 0) throw IoError("waitpid failed");
        auto it = alive.find(pid);
        if (it == alive.end()) continue;
        const size_t i = it->second;
        alive.erase(it);
        nlohmann::json j;
        std::ifstream in(part(i));
        try {
            in >> j;
        } catch (const std::exception&) {
            j = {{"error", "worker for task " + std::to_string(i) + " died without a result"},
                 {"code", static_cast<int>(ExitCode::numerical)}};
        }
        in.close();
        fs::remove(part(i));
        if (j.contains("error")) {
            failures[i] = {static_cast<ExitCode>(j["code"].get<int>()), j["error"].get<std::string>()};
            stop = true;
        } else {
            run.outputs[i] = TaskOutput::from_json(j);
        }
    }
    if (!failures.empty()) {
        run.error_code = failures.begin()->second.first;
        run.error_message = failures.begin()->second.second;
    }
    return run;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Real x_star_of(const RunConfig& cfg, const Equilibrium& eq1) {
    ScopedPrecision g(eq1.data.digits);
    if (cfg.x_star == "midpoint") return (eq1.data.a + eq1.data.b) / 2;
    return from_decimal(cfg.x_star, eq1.data.digits);
}

std::vector<std::pair<Real, Real>> real_grid(const RunConfig& cfg, int digits) {
    ScopedPrecision g(digits);
    std::vector<std::pair<Real, Real>> out;
    for (const auto& [a, b] : cfg.effective_grid()) out.emplace_back(from_decimal(a, digits), from_decimal(b, digits));
    return out;
}

// ---- equilibrium ----

TaskOutput equilibrium_task(const RunConfig& cfg, const std::string& t, std::ostream& log) {
    auto t0 = Clock::now();
    Equilibrium e = cached_equilibrium(cfg, t, cfg.digits);
    ScopedPrecision g(cfg.digits);
    const EquilibriumData& d = e.data;
    TaskOutput out;
    Table& tab = out.tables["equilibrium"];
    tab.header = {"t", "c0", "c1", "a", "b", "alpha", "beta", "ell", "config_hash"};
    tab.rows.push_back({t, csv_num(d.c0), csv_num(d.c1), csv_num(d.a), csv_num(d.b), csv_num(d.alpha),
                        csv_num(d.beta), csv_num(d.ell), cfg.hash()});
    out.summary = {{"t", t},
                   {"support_width", csv_num(d.b - d.a)},
                   {"mass_error", csv_num(abs(e.table.mass_check - 1))},
                   {"seconds", since(t0)}};
    log << "[equilibrium] t=" << t << " done\n";
    return out;
}

// ---- biortho ----

TaskOutput biortho_task(const RunConfig& cfg, int n, std::ostream& log) {
    auto t0 = Clock::now();
    const int d = system_digits(cfg, n), m = n - 1 + cfg.extra_degrees;
    BiorthoSystem s = cached_system(cfg, cfg.make_potential(d), n, m, d);
    ScopedPrecision g(d);
    const auto ctx = PrecisionContext::with_digits(d);
    TaskOutput out;
    Table& tab = out.tables["biortho"];
    tab.header = {"n", "j", "h", "config_hash"};
    for (int j = 0; j <= m; ++j) tab.rows.push_back({std::to_string(n), std::to_string(j), csv_num(s.h[j]), cfg.hash()});
    const Real defect = orthogonality_defect(s, ctx);
    const bool positive = std::all_of(s.h.begin(), s.h.end(), [](const Real& h) { return h > 0; });
    bool inter = true;
    std::vector<ZeroSet> z = all_zeros(s, ctx);
    for (size_t j = 1; j < z.size(); ++j)
        inter = inter && interlaces(z[j - 1].zeros_p, z[j].zeros_p) && interlaces(z[j - 1].zeros_qx, z[j].zeros_qx);
    out.summary = {{"n", n},          {"m", m},
                   {"digits", d},     {"orthogonality_defect", csv_num(defect)},
                   {"h_positive", positive}, {"zeros_interlace", inter},
                   {"seconds", since(t0)}};
    if (m >= n) {
        // h_n against 2 pi c1^{1/2} e^{n l_1}
        Equilibrium e1 = cached_equilibrium(cfg, "1", cfg.digits);
        ScopedPrecision g2(d);
        Real pred = 2 * pi() * boost::multiprecision::sqrt(e1.data.c1) *
                    boost::multiprecision::exp(Real(n) * e1.data.ell);
        out.summary["h_n_ratio_error"] = csv_num(abs(s.h[n] / pred - 1));
    }
    log << "[biortho] n=" << n << " done (" << since(t0) << " s)\n";
    return out;
}

// ---- universality ----

TaskOutput universality_task(const RunConfig& cfg, int n, std::ostream& log) {
    auto t0 = Clock::now();
    const int d = system_digits(cfg, n);
    Equilibrium eq1 = cached_equilibrium(cfg, "1", cfg.digits);
    const Potential V = cfg.make_potential(d);
    BiorthoSystem s = cached_system(cfg, V, n, n - 1, d);
    ScopedPrecision g(d);
    const auto ctx = PrecisionContext::with_digits(d);
    KernelRequest req;
    req.n = n;
    req.regime = cfg.regime;
    req.scaling = cfg.scaling;
    if (cfg.regime == Regime::bulk) req.x_star = x_star_of(cfg, eq1);
    req.grid = real_grid(cfg, d);
    KernelResult r = evaluate_kernel(s, eq1, req, ctx);

    TaskOutput out;
    Table& tab = out.tables["universality"];
    tab.header = {"regime", "n", "xi", "eta", "value", "reference", "abs_err", "rel_err", "config_hash"};
    const auto grid = cfg.effective_grid();
    for (size_t i = 0; i < grid.size(); ++i)
        tab.rows.push_back({regime_name(cfg.regime), std::to_string(n), grid[i].first, grid[i].second,
                            csv_num(r.values[i]), csv_num(r.reference[i]), csv_num(r.abs_err[i]),
                            csv_num(r.rel_err[i]), cfg.hash()});
    out.summary = {{"n", n},
                   {"digits", d},
                   {"abs_err", error_stats(r.abs_err)},
                   {"rel_err", error_stats(r.rel_err)}};
    if (cfg.regime == Regime::edge_left && cfg.check_reflection) {
        BiorthoSystem w = cached_system(cfg, reflect_potential(V, n), n, n - 1, d);
        ScopedPrecision g2(d);
        Real worst = 0;
        for (size_t i = 0; i < req.grid.size(); ++i) {
            ScaledValue v = edge_scaled_reflected(w, eq1, req.grid[i].first, req.grid[i].second, ctx);
            worst = std::max(worst, Real(abs(v.value - r.values[i])));
        }
        out.summary["reflection_max_diff"] = csv_num(worst);
    }
    out.summary["seconds"] = since(t0);
    log << "[universality] n=" << n << " done (" << since(t0) << " s)\n";
    return out;
}

// ---- diagnostics ----

TaskOutput diagnostics_task(const RunConfig& cfg, int n, bool with_alpha, std::ostream& log) {
    auto t0 = Clock::now();
    const int d = system_digits(cfg, n);
    Equilibrium eq1 = cached_equilibrium(cfg, "1", cfg.digits);
    const Real delta = from_decimal(cfg.delta, d), delta_p = from_decimal(cfg.delta_prime, d);
    const int m = std::max(n - 1 + cfg.extra_degrees, cd_degrees_needed(n, delta, cfg.M));
    BiorthoSystem s = cached_system(cfg, cfg.make_potential(d), n, m, d);
    ScopedPrecision g(d);
    const auto ctx = PrecisionContext::with_digits(d);
    const std::string H = cfg.hash(), N = std::to_string(n);
    const auto grid_text = cfg.effective_grid();
    const auto grid = real_grid(cfg, d);
    TaskOutput out;

    CDDiagnostics cd = cd_coefficients(s, delta, cfg.M, {}, eq1.data, ctx);
    Real va = 0, vb = 0;
    for (int j = 0; j <= m; ++j)
        for (int k = 0; k <= m; ++k) {
            if (k > j + 1) va = std::max(va, Real(abs(cd.a(j, k))));
            if (k > j + cd.k_delta) vb = std::max(vb, Real(abs(cd.b(j, k))));
        }
    const Real alpha_m1 = cd.alpha_limits.at(-1);
    const Real dev = abs(cd.a(n - 1, n) - alpha_m1);
    Table& ct = out.tables["diagnostics_coefficients"];
    ct.header = {"n", "k_delta", "a_n-1_n", "alpha_-1", "deviation", "max_a_above_band", "max_b_above_band",
                 "config_hash"};
    ct.rows.push_back({N, std::to_string(cd.k_delta), csv_num(cd.a(n - 1, n)), csv_num(alpha_m1), csv_num(dev),
                       csv_num(va), csv_num(vb), H});

    const Real xstar = x_star_of(cfg, eq1);
    Table& id = out.tables["diagnostics_identity"];
    id.header = {"n", "xi", "eta", "residual", "lhs", "J1_conj", "J2_conj", "main_term", "target", "config_hash"};
    Real worst_res = 0, worst_j1 = 0, worst_main = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        const Complex u = bulk_point(eq1, xstar, Complex(grid[i].first), n, ctx);
        const Complex v = bulk_point(eq1, xstar, Complex(grid[i].second), n, ctx);
        CDDecomposition r = cd_decomposition(s, cd, eq1, u, v, ctx);
        const Complex target = main_term_target(xstar, Complex(grid[i].first), Complex(grid[i].second));
        worst_res = std::max(worst_res, abs(r.residual));
        worst_j1 = std::max(worst_j1, abs(r.J1_conj));
        worst_main = std::max(worst_main, abs(r.main_term - target));
        id.rows.push_back({N, grid_text[i].first, grid_text[i].second, csv_num(abs(r.residual)), csv_num(abs(r.lhs)),
                           csv_num(abs(r.J1_conj)), csv_num(abs(r.J2_conj)), csv_num(r.main_term.re),
                           csv_num(target.re), H});
    }

    Table& sp = out.tables["diagnostics_split"];
    sp.header = {"n", "xi", "eta", "last_1", "last_2", "last_3", "K1", "K2", "K3", "K4", "K4_scaled",
                 "airy_reference", "config_hash"};
    const Real c = boost::multiprecision::pow(pi() * eq1.data.beta * n, Real(2) / 3);
    for (size_t i = 0; i < grid.size(); ++i) {
        const Real u = eq1.data.b + grid[i].first / c, v = eq1.data.b + grid[i].second / c;
        KernelSplit k = kernel_split(s, eq1, delta, delta_p, cfg.M, u, v, ctx);
        const Real ref = split_airy_reference(eq1.data, cfg.M, grid[i].first, grid[i].second, ctx);
        sp.rows.push_back({N, grid_text[i].first, grid_text[i].second, std::to_string(k.bounds.last[0]),
                           std::to_string(k.bounds.last[1]), std::to_string(k.bounds.last[2]),
                           csv_num(k.conjugated[0]), csv_num(k.conjugated[1]), csv_num(k.conjugated[2]),
                           csv_num(k.conjugated[3]), csv_num(k.conjugated[3] / c), csv_num(ref), H});
    }

    if (with_alpha) {
        Table& at = out.tables["diagnostics_alpha"];
        at.header = {"l", "alpha_l", "config_hash"};
        for (const auto& [l, a] : cd.alpha_limits) at.rows.push_back({std::to_string(l), csv_num(a), H});
    }
    out.summary = {{"n", n},
                   {"digits", d},
                   {"m", m},
                   {"identity_residual_max", csv_num(worst_res)},
                   {"identity_tolerance", csv_num(pow10(-(d / 4)))},
                   {"a_deviation", csv_num(dev)},
                   {"J1_conj_max", csv_num(worst_j1)},
                   {"main_term_err_max", csv_num(worst_main)},
                   {"seconds", since(t0)}};
    log << "[diagnostics] n=" << n << " done (" << since(t0) << " s)\n";
    return out;
}

// ---- verify ----

struct Checks {
    Table& t;
    const std::string& hash;
    int failed = 0;
    void add(const std::string& name, const std::string& subject, const Real& value, const Real& tol, bool pass) {
        t.rows.push_back({name, subject, csv_num(value), csv_num(tol), pass ? "pass" : "FAIL", hash});
        if (!pass) ++failed;
    }
};

TaskOutput verify_t_task(const RunConfig& cfg, const std::string& t, std::ostream& log) {
    Equilibrium e = cached_equilibrium(cfg, t, cfg.digits);
    const int d = cfg.digits;
    ScopedPrecision g(d);
    const auto ctx = PrecisionContext::with_digits(d);
    const EquilibriumData& q = e.data;
    const std::string H = cfg.hash();
    TaskOutput out;
    Table& tab = out.tables["verify"];
    tab.header = {"check", "subject", "value", "tolerance", "status", "config_hash"};
    Checks ck{tab, H};
    const std::string subj = "t=" + t;
    const Real mass = abs(e.table.mass_check - 1), mt = pow10(-(d / 3));
    ck.add("mass", subj, mass, mt, mass < mt);
    Real spread = 0;
    for (const char* f : {"0.25", "0.5", "0.75"}) {
        const Real y = q.a + Real(f) * (q.b - q.a);
        spread = std::max(spread, Real(abs(effective_potential(q, e.table, y, ctx))));
    }
    const Real st = pow10(-(d / 4));
    ck.add("euler_lagrange_spread", subj, spread, st, spread < st);
    for (const Real& y : {Real(q.b + Real("0.5")), Real(q.a - Real("0.5"))}) {
        const Real v = effective_potential(q, e.table, y, ctx);
        ck.add("strict_outside", subj + " y=" + to_decimal(y, 8), v, Real(0), v < 0);
    }
    out.summary = {{"subject", subj}, {"failed", ck.failed}};
    log << "[verify] " << subj << " done\n";
    return out;
}

TaskOutput verify_n_task(const RunConfig& cfg, int n, std::ostream& log) {
    const int d = system_digits(cfg, n);
    Equilibrium eq1 = cached_equilibrium(cfg, "1", cfg.digits);
    BiorthoSystem s = cached_system(cfg, cfg.make_potential(d), n, n - 1, d);
    ScopedPrecision g(d);
    const auto ctx = PrecisionContext::with_digits(d);
    const std::string H = cfg.hash(), subj = "n=" + std::to_string(n);
    TaskOutput out;
    Table& tab = out.tables["verify"];
    tab.header = {"check", "subject", "value", "tolerance", "status", "config_hash"};
    Checks ck{tab, H};
    const Real tol = pow10(-(d / 3));
    const Real defect = orthogonality_defect(s, ctx);
    ck.add("orthogonality_defect", subj, defect, tol, defect < tol);
    const Real hmin = *std::min_element(s.h.begin(), s.h.end());
    ck.add("h_positive", subj, hmin, Real(0), hmin > 0);
    const Real tr = abs(kernel_trace(s, ctx) - n);
    ck.add("trace", subj, tr, tol, tr < tol);
    const Real mid = (eq1.data.a + eq1.data.b) / 2;
    const Real pr = projection_residual(s, mid, Real(mid + Real("0.3")), ctx);
    ck.add("projection", subj, pr, tol, pr < tol);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    Real worst = 0;
    for (int i = 0; i < 5; ++i) {
        const Real x = eq1.data.a + Real(U(rng)) * (eq1.data.b - eq1.data.a);
        const Real y = eq1.data.a + Real(U(rng)) * (eq1.data.b - eq1.data.a);
        const Real raw = kernel_raw(s, x, x) * kernel_raw(s, y, y) - kernel_raw(s, x, y) * kernel_raw(s, y, x);
        const Real cj = kernel_conjugated(s, eq1, x, x, ctx) * kernel_conjugated(s, eq1, y, y, ctx) -
                        kernel_conjugated(s, eq1, x, y, ctx) * kernel_conjugated(s, eq1, y, x, ctx);
        worst = std::max(worst, Real(abs(raw - cj) / std::max(Real(1), Real(abs(raw)))));
    }
    ck.add("gauge_determinants", subj, worst, tol, worst < tol);
    out.summary = {{"subject", subj}, {"failed", ck.failed}};
    log << "[verify] " << subj << " done\n";
    return out;
}

}  // namespace

int run_command(const CliOptions& opt, std::ostream& log) {
    static const std::vector<std::string> commands{"equilibrium", "biortho", "universality", "diagnostics", "verify"};
    if (std::find(commands.begin(), commands.end(), opt.command) == commands.end())
        throw ValidationError("unknown command '" + opt.command + "'");
    const RunConfig cfg = resolve_config(opt);
    ensure_dir(cfg.output_dir);

    std::vector<std::function<TaskOutput()>> tasks;
    const std::string& c = opt.command;
    if (c == "equilibrium") {
        for (const auto& t : cfg.t_list) tasks.push_back([&cfg, t, &log] { return equilibrium_task(cfg, t, log); });
    } else if (c == "biortho") {
        for (int n : cfg.n_list) tasks.push_back([&cfg, n, &log] { return biortho_task(cfg, n, log); });
    } else if (c == "universality") {
        for (int n : cfg.n_list) tasks.push_back([&cfg, n, &log] { return universality_task(cfg, n, log); });
    } else if (c == "diagnostics") {
        for (size_t i = 0; i < cfg.n_list.size(); ++i) {
            const int n = cfg.n_list[i];
            tasks.push_back([&cfg, n, i, &log] { return diagnostics_task(cfg, n, i == 0, log); });
        }
    } else {
        for (const auto& t : cfg.t_list) tasks.push_back([&cfg, t, &log] { return verify_t_task(cfg, t, log); });
        for (int n : cfg.n_list) tasks.push_back([&cfg, n, &log] { return verify_n_task(cfg, n, log); });
    }

    // the shared t = 1 equilibrium goes into the cache once, before any workers start
    if (opt.jobs > 1 && c != "equilibrium" && !cfg.cache_dir.empty()) (void)cached_equilibrium(cfg, "1", cfg.digits);

    TaskRun run = run_tasks(tasks, opt.jobs, cfg.output_dir, log);

    std::map<std::string, Table> tables;
    nlohmann::json parts = nlohmann::json::array();
    int failed_checks = 0;
    for (const auto& o : run.outputs) {
        if (!o) continue;
        for (const auto& [name, t] : o->tables) {
            Table& dst = tables[name];
            if (dst.header.empty()) dst.header = t.header;
            dst.rows.insert(dst.rows.end(), t.rows.begin(), t.rows.end());
        }
        parts.push_back(o->summary);
        if (o->summary.contains("failed")) failed_checks += o->summary["failed"].get<int>();
    }
    for (const auto& [name, t] : tables) write_csv((fs::path(cfg.output_dir) / (name + ".csv")).string(), t);

    nlohmann::json summary;
    summary["command"] = c;
    summary["config_hash"] = cfg.hash();
    summary["config"] = cfg.canonical();
    summary["results"] = parts;
    int code = 0;
    if (run.error_code) {
        summary["status"] = "error";
        summary["error"] = run.error_message;
        code = static_cast<int>(*run.error_code);
        log << "error: " << run.error_message << "\n";
    } else if (failed_checks > 0) {
        summary["status"] = "failed";
        summary["failed_checks"] = failed_checks;
        code = static_cast<int>(ExitCode::numerical);
        log << c << ": " << failed_checks << " check(s) failed\n";
    } else {
        summary["status"] = "ok";
    }
    write_json((fs::path(cfg.output_dir) / (c + "_summary.json")).string(), summary);
    return code;
}

}  // namespace xs
