#include "tessera/driver.hpp"

#include "tessera/gauss.hpp"
#include "tessera/geometry.hpp"
#include "tessera/sensitivity.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

namespace tessera::driver {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

const char* action_name(CandidateKind k) {
    switch (k) {
        case CandidateKind::Exploit: return "exploit";
        case CandidateKind::Screen: return "screen";
        default: return "explore";
    }
}

struct Problem {
    int nvar = 0;
    transforms::ProbabilitySpace space = transforms::ProbabilitySpace::standard_gaussian(1);
    std::function<std::pair<double, Outcome>(const Vector&)> eval_physical;
    bool keep_raw = true;

    std::pair<std::optional<double>, Outcome> evaluate_G(const Vector& u) const {
        Vector x = space.from_G(u);
        auto [g, out] = eval_physical(x);
        if (keep_raw) return {g, out};
        return {std::nullopt, out};
    }
};

Problem make_problem(const RunConfig& cfg, std::shared_ptr<bench::ExternalLsf>& external) {
    Problem p;
    if (cfg.name == "custom") {
        if (cfg.custom_cmd.empty()) throw ConfigError("custom problem requires custom_cmd");
        if (cfg.nvar < 1) throw ConfigError("custom problem requires nvar");
        p.nvar = cfg.nvar;
        p.space = transforms::ProbabilitySpace::standard_gaussian(cfg.nvar);
        external = std::make_shared<bench::ExternalLsf>(cfg.custom_cmd, cfg.nvar, cfg.binary_only);
        auto ext_ptr = external;
        p.eval_physical = [ext_ptr](const Vector& x) { return ext_ptr->evaluate(x); };
        p.keep_raw = !cfg.binary_only;
        return p;
    }
    bench::Benchmark b = bench::make_benchmark(cfg.name, cfg.nvar);
    p.nvar = b.nvar;
    p.space = b.space;
    auto g = b.g;
    p.eval_physical = [g](const Vector& x) -> std::pair<double, Outcome> {
        double v = g(x);
        return {v, v <= 0.0 ? Outcome::Failure : Outcome::Safe};
    };
    return p;
}

} // namespace

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line, section;
    std::vector<std::string> offenders;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            if (section != "problem" && section != "algorithm" && section != "output")
                offenders.push_back("[" + section + "]");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            offenders.push_back(t);
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        try {
            if (section == "problem" && key == "name") cfg.name = val;
            else if (section == "problem" && key == "nvar") cfg.nvar = std::stoi(val);
            else if (section == "problem" && key == "custom_cmd") cfg.custom_cmd = val;
            else if (section == "problem" && key == "binary_only") cfg.binary_only = (val == "true" || val == "1");
            else if (section == "algorithm" && key == "budget") cfg.budget = std::stoi(val);
            else if (section == "algorithm" && key == "seed") cfg.seed = std::stoull(val);
            else if (section == "algorithm" && key == "pool_size") cfg.pool_size = std::stoi(val);
            else if (section == "algorithm" && key == "gm_degree") cfg.gm_degree = std::stoi(val);
            else if (section == "algorithm" && key == "screening_k") cfg.screening_k = std::stoi(val);
            else if (section == "algorithm" && key == "pout_eps") cfg.pout_eps = std::stod(val);
            else if (section == "algorithm" && key == "stop_rules") {
                std::istringstream ss(val);
                std::string rule;
                while (std::getline(ss, rule, ',')) {
                    rule = trim(rule);
                    if (rule.empty()) continue;
                    if (rule != "mix_below_pf" && rule != "pout_small")
                        offenders.push_back("stop_rules:" + rule);
                    else cfg.stop_rules.push_back(rule);
                }
            }
            else if (section == "output" && key == "dir") cfg.out_dir = val;
            else if (section == "output" && key == "audit") cfg.audit = (val == "true" || val == "1");
            else if (section == "output" && key == "progress") cfg.progress = (val == "true" || val == "1");
            else offenders.push_back((section.empty() ? key : section + "." + key));
        } catch (const std::exception&) {
            offenders.push_back(key + "=" + val);
        }
    }
    if (!offenders.empty()) {
        std::string msg = "invalid configuration entries:";
        for (const auto& o : offenders) msg += " " + o;
        throw ConfigError(msg);
    }
    if (cfg.name.empty()) throw ConfigError("missing problem name");
    if (cfg.budget <= 0) throw ConfigError("budget must be positive");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse_config(is);
}

namespace {

RunResult run_loop(const RunConfig& cfg, const std::vector<EDPoint>& replay_points,
                   est::Estimator* out_state) {
    auto t0 = std::chrono::steady_clock::now();
    std::shared_ptr<bench::ExternalLsf> external;
    Problem problem = make_problem(cfg, external);

    est::EstimatorParams eparams;
    eparams.gm_index = cfg.gm_degree;
    est::Estimator est(problem.nvar, eparams);
    for (const auto& p : replay_points) est.update(p.coords, p.outcome, p.raw_g);

    ext::Params xparams;
    xparams.pool_size = cfg.pool_size;
    xparams.screening_k = cfg.screening_k;

    RunResult result;
    for (int step = est.nsim() + 1; step <= cfg.budget; ++step) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(step));
        ext::Candidate cand = ext::decide(est, xparams, rng, step);
        if (cand.degenerate_circumcenter) est.note_degenerate_circumcenter();
        auto [raw_g, outcome] = problem.evaluate_G(cand.coords);
        auto snap = est.update(cand.coords, outcome, raw_g);
        result.steps.push_back({snap.nsim, cand.kind});
        if (cfg.progress) {
            std::cout << "nsim=" << snap.nsim << " p_f_v=" << snap.p_f_v
                      << " p_out=" << est.current_p_out() << " action=" << action_name(cand.kind)
                      << "\n";
        }
        if (cfg.audit && est.triangulation() && est.triangulation()->has_simplices()) {
            auto a = est.partition_audit();
            result.audit_errors.push_back(std::fabs(1.0 - a.total));
        }
        for (const auto& rule : cfg.stop_rules) {
            if (rule == "mix_below_pf" && snap.p_f_v > 0.0 && snap.p_mix < snap.p_f_v)
                result.stopped_by = rule;
            if (rule == "pout_small" && snap.p_f_v > 0.0 &&
                snap.p_out_upper < cfg.pout_eps * snap.p_f_v)
                result.stopped_by = rule;
        }
        if (!result.stopped_by.empty()) break;
    }

    result.history = est.history();
    if (!est.history().empty()) result.final_snapshot = est.last();
    const auto* tri = est.triangulation();
    if (tri && tri->has_simplices()) {
        auto pj = [&est, tri](int cid) { return est.pj(cid); };
        if (!tri->clusters(SimplexClass::Mixed).empty()) {
            result.t2 = sens::t_v2(*tri, pj);
            if (!problem.space.is_standard_gaussian())
                result.t2_physical = sens::t_v2_physical(*tri, pj, problem.space);
        }
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out_state) *out_state = std::move(est);
    return result;
}

void write_artifacts(const RunConfig& cfg, const RunResult& result, const est::Estimator& est) {
    fs::create_directories(cfg.out_dir);

    {
        std::ofstream os(fs::path(cfg.out_dir) / "config.txt");
        os << "[problem]\nname = " << cfg.name << "\nnvar = " << est.nvar() << "\n";
        if (!cfg.custom_cmd.empty())
            os << "custom_cmd = " << cfg.custom_cmd << "\nbinary_only = "
               << (cfg.binary_only ? "true" : "false") << "\n";
        os << "\n[algorithm]\nbudget = " << cfg.budget << "\nseed = " << cfg.seed
           << "\npool_size = " << cfg.pool_size << "\ngm_degree = " << cfg.gm_degree
           << "\nscreening_k = " << cfg.screening_k << "\n";
        if (!cfg.stop_rules.empty()) {
            os << "stop_rules = ";
            for (std::size_t i = 0; i < cfg.stop_rules.size(); ++i)
                os << (i ? "," : "") << cfg.stop_rules[i];
            os << "\n";
        }
        os << "\n[output]\ndir = " << cfg.out_dir << "\naudit = " << (cfg.audit ? "true" : "false")
           << "\n";
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "convergence.csv");
        os << est::Estimator::csv_header() << "\n";
        for (const auto& s : result.history) os << est::Estimator::csv_row(s) << "\n";
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "sensitivity.csv");
        os << "v,t_v2\n";
        if (result.t2.has_value()) {
            os.precision(12);
            for (int v = 0; v < result.t2->size(); ++v)
                os << (v + 1) << ',' << (*result.t2)(v) << "\n";
            if (result.t2_physical.has_value()) {
                os << "# physical-space sensitivities\n";
                for (int v = 0; v < result.t2_physical->size(); ++v)
                    os << "# v" << (v + 1) << "," << (*result.t2_physical)(v) << "\n";
            }
            const auto* tri = est.triangulation();
            auto pj = [&est](int cid) { return est.pj(cid); };
            for (const auto& group : sens::mixed_subgroups(*tri)) {
                for (const auto& plane : sens::plane_clusters(*tri, group, pj)) {
                    os << "# plane members=" << plane.member_cells.size() << " offsets=["
                       << plane.offset_lo << "," << plane.offset_hi << "] normal=";
                    for (int v = 0; v < plane.normal.size(); ++v)
                        os << (v ? " " : "") << plane.normal(v);
                    os << "\n";
                }
            }
        } else {
            os << "# no mixed simplices; sensitivities undefined\n";
        }
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "skeleton.txt");
        est.save_skeleton(os);
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "summary.txt");
        const auto& s = result.final_snapshot;
        os.precision(12);
        os << "problem " << cfg.name << "\n";
        os << "nsim " << s.nsim << "\n";
        os << "seed " << cfg.seed << "\n";
        os << "p_f_pure " << s.p_f_pure << "\n";
        os << "p_f_v " << s.p_f_v << "\n";
        os << "p_mix " << s.p_mix << "\n";
        os << "p_out_lower " << s.p_out_lower << "\n";
        os << "p_out_upper " << s.p_out_upper << "\n";
        if (s.p_out_div) os << "p_out_div " << *s.p_out_div << "\n";
        os << "r " << s.r << "\n";
        os << "R " << s.R << "\n";
        if (result.t2) {
            os << "t_v2";
            for (int v = 0; v < result.t2->size(); ++v) os << ' ' << (*result.t2)(v);
            os << "\n";
        }
        if (result.t2_physical) {
            os << "t_v2_physical";
            for (int v = 0; v < result.t2_physical->size(); ++v)
                os << ' ' << (*result.t2_physical)(v);
            os << "\n";
        }
        os << "stopped_by " << (result.stopped_by.empty() ? "budget" : result.stopped_by) << "\n";
        os << "negative_cubature_events " << est.negative_cubature_events() << "\n";
        os << "degenerate_circumcenters " << est.degenerate_circumcenter_events() << "\n";
        if (!result.audit_errors.empty()) {
            double worst = 0.0;
            for (double e : result.audit_errors) worst = std::max(worst, e);
            os << "partition_audit_max_error " << worst << "\n";
        }
        os << "wall_seconds " << result.wall_seconds << "\n";
    }
}

} // namespace

RunResult run_in_memory(const RunConfig& cfg, est::Estimator* out_state) {
    return run_loop(cfg, {}, out_state);
}

RunResult run(const RunConfig& cfg, const std::string& resume_dir) {
    std::vector<EDPoint> replay;
    if (!resume_dir.empty()) {
        std::ifstream is(fs::path(resume_dir) / "skeleton.txt");
        if (!is) throw ConfigError("resume: cannot open " + resume_dir + "/skeleton.txt");
        // points are replayed; the triangulation is rebuilt deterministically
        std::string tag;
        int version = 0, dim = 0;
        std::size_t npts = 0;
        is >> tag >> version >> tag >> dim >> tag >> npts;
        for (std::size_t i = 0; i < npts; ++i) {
            EDPoint p;
            int outcome;
            std::string raw;
            is >> p.id >> outcome >> raw;
            p.outcome = outcome ? Outcome::Failure : Outcome::Safe;
            if (raw != "nan") p.raw_g = std::stod(raw);
            p.coords.resize(dim);
            for (int v = 0; v < dim; ++v) is >> p.coords(v);
            replay.push_back(std::move(p));
        }
    }
    est::Estimator state(1, {});
    RunResult result = run_loop(cfg, replay, &state);
    write_artifacts(cfg, result, state);
    return result;
}

std::string report(const std::string& run_dir) {
    std::ifstream summary(fs::path(run_dir) / "summary.txt");
    std::ifstream conv(fs::path(run_dir) / "convergence.csv");
    if (!summary || !conv) throw std::runtime_error("report: not a run directory: " + run_dir);

    std::ostringstream os;
    os << "run report: " << run_dir << "\n";
    std::string line;
    double p_f_v = 0.0, p_mix = 0.0, p_out_upper = 0.0;
    while (std::getline(summary, line)) {
        if (line.rfind("wall_seconds", 0) == 0) continue;  // keep reports reproducible
        os << line << "\n";
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "p_f_v") ls >> p_f_v;
        if (key == "p_mix") ls >> p_mix;
        if (key == "p_out_upper") ls >> p_out_upper;
    }
    os << "stopping rules: mix_below_pf "
       << ((p_f_v > 0.0 && p_mix < p_f_v) ? "satisfied" : "not satisfied") << "; pout_small(1e-2) "
       << ((p_f_v > 0.0 && p_out_upper < 1e-2 * p_f_v) ? "satisfied" : "not satisfied") << "\n";

    std::vector<std::string> rows;
    while (std::getline(conv, line)) rows.push_back(line);
    os << "estimate history (first/last rows of " << (rows.empty() ? 0 : rows.size() - 1)
       << "):\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 || i + 5 >= rows.size() || i <= 3) os << rows[i] << "\n";
        else if (i == 4) os << "...\n";
    }
    return os.str();
}

} // namespace tessera::driver
