#include "tessera/benchmarks.hpp"
#include "tessera/driver.hpp"
#include "tessera/oracle.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int cmd_run(const std::string& config_path, const std::string& resume_dir,
            const std::string& out_override) {
    auto cfg = tessera::driver::parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    auto result = tessera::driver::run(cfg, resume_dir);
    std::cout << "done: nsim=" << result.final_snapshot.nsim
              << " p_f_v=" << result.final_snapshot.p_f_v << " -> " << cfg.out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    std::cout << tessera::driver::report(dir);
    return 0;
}

int cmd_list() {
    for (const auto& name : tessera::bench::benchmark_names()) {
        int nvar = 0;
        if (name.rfind("g_", 0) == 0) nvar = 2;  // families instantiate at any dim 2..8
        auto b = tessera::bench::make_benchmark(name, nvar);
        std::cout << b.name << "  nvar=" << (name.rfind("g_", 0) == 0 ? "2..8" : std::to_string(b.nvar))
                  << "  reference_pf=" << b.ref.pf << "  (" << b.ref.provenance << ")\n";
    }
    return 0;
}

int cmd_oracle(const std::string& problem, int nvar, const std::string& method,
               std::uint64_t n, double scale, std::uint64_t seed) {
    auto b = tessera::bench::make_benchmark(problem, nvar);
    auto lsf = [&b](const tessera::Vector& x) { return b.g(x) <= 0.0; };
    tessera::oracle::Result res;
    if (method == "mc")
        res = tessera::oracle::mc_pf(lsf, b.space, n, seed);
    else if (method == "is")
        res = tessera::oracle::is_pf(lsf, b.space, n, scale, seed);
    else
        throw tessera::driver::ConfigError("oracle method must be mc or is");
    std::cout << "estimate=" << res.estimate << " std_error=" << res.std_error << " n=" << res.n
              << " seed=" << res.seed << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive simplex-decomposition failure probability estimator"};
    app.require_subcommand(1);

    std::string config_path, resume_dir, out_override, report_dir;
    auto* run = app.add_subcommand("run", "run the adaptive loop from a config file");
    run->add_option("-c,--config", config_path, "configuration file")->required();
    run->add_option("--resume", resume_dir, "previous run directory to continue");
    run->add_option("-o,--out", out_override, "output directory override");

    auto* report = app.add_subcommand("report", "summarize a finished run directory");
    report->add_option("dir", report_dir, "run directory")->required();

    app.add_subcommand("list", "list registered limit-state problems");

    std::string oracle_problem, oracle_method = "mc";
    int oracle_nvar = 0;
    std::uint64_t oracle_n = 1000000, oracle_seed = 1;
    double oracle_scale = 1.5;
    auto* orc = app.add_subcommand("oracle", "brute-force reference estimate (mc or is)");
    orc->add_option("-p,--problem", oracle_problem, "benchmark name")->required();
    orc->add_option("--nvar", oracle_nvar, "dimension (N-d families)");
    orc->add_option("-m,--method", oracle_method, "mc or is");
    orc->add_option("-n", oracle_n, "sample count");
    orc->add_option("--scale", oracle_scale, "importance-sampling density scale");
    orc->add_option("--seed", oracle_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, resume_dir, out_override);
        if (report->parsed()) return cmd_report(report_dir);
        if (app.get_subcommand("list")->parsed()) return cmd_list();
        if (orc->parsed())
            return cmd_oracle(oracle_problem, oracle_nvar, oracle_method, oracle_n, oracle_scale,
                              oracle_seed);
    } catch (const tessera::driver::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
