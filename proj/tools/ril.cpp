#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ril/config.hpp"
#include "ril/experiments.hpp"
#include "ril/green.hpp"
#include "ril/interlace.hpp"
#include "ril/potential.hpp"
#include "ril/tilt.hpp"
#include "ril/walk.hpp"

using namespace ril;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string site_str(const Site& s) {
    std::string out;
    for (int i = 0; i < s.d; ++i) out += (i ? " " : "") + std::to_string(s[i]);
    return out;
}

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

// results.csv: a comment line with the manifest hash and units, then the header and rows
class Csv {
public:
    Csv(const std::filesystem::path& path, const std::string& hash, const std::string& units,
        const std::vector<std::string>& header)
        : os_(path, std::ios::binary) {
        if (!os_) throw std::runtime_error("cannot write " + path.string());
        os_ << "# manifest " << hash << "; units: " << units << "\n";
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << quoted(cells[i]);
        os_ << "\n";
    }

private:
    std::ofstream os_;
};

std::vector<std::string> estimator_cells(const EstimatorResult& r) {
    return {num(r.estimate), num(r.std_error), num(r.ci_low), num(r.ci_high), std::to_string(r.n), num(r.bias_bound),
            r.note};
}
const std::vector<std::string> kEstimatorHeader = {"estimate", "std_error", "ci_low", "ci_high", "n", "bias_bound", "note"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::string iso_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Outcome {
    std::string summary;
    bool ok = true;  // false on an invariant violation
};

std::shared_ptr<const TiltProfile> profile_of(const RunConfig& rc) { return TiltProfile::build(rc.exp.tilt); }

Outcome cmd_green(const RunConfig& rc, Csv& csv) {
    const int d = rc.exp.tilt.d;
    const SiteSet M = parse_set(rc.set_M, d);
    GreenTable gt;
    if (rc.green_flavor == "free") {
        gt = free_green_table(M);
    } else if (rc.green_flavor == "tilted") {
        gt = tilted_green_table(M, *profile_of(rc));
    } else {
        const SiteSet U = sup_ball(d, rc.killed_radius);
        if (!is_subset(M, U)) throw std::invalid_argument("green: M must lie in the killing box");
        KilledSolver solver(U);
        gt.sites = M;
        gt.flavor = GreenFlavor::killed;
        gt.values.resize(static_cast<Eigen::Index>(M.size()), static_cast<Eigen::Index>(M.size()));
        for (std::size_t j = 0; j < M.size(); ++j) {
            const Eigen::VectorXd col = solver.column(M[j]);
            for (std::size_t i = 0; i < M.size(); ++i) gt.values(i, j) = col(U.index_of(M[i]));
        }
    }
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M.size(); ++j)
            csv.row({rc.green_flavor, site_str(M[i]), site_str(M[j]), num(gt.values(i, j))});
    return {"green " + rc.green_flavor + ": |M|=" + std::to_string(M.size()) + " g(x0,x0)=" + num(gt.values(0, 0)), true};
}

Outcome cmd_capacity(const RunConfig& rc, Csv& csv) {
    const SiteSet M = parse_set(rc.set_M, rc.exp.tilt.d);
    EquilibriumMeasure em;
    if (rc.tilted)
        em = tilted_equilibrium_and_capacity(M, *profile_of(rc)).measure;
    else
        em = equilibrium_and_capacity(M);
    for (std::size_t i = 0; i < M.size(); ++i) csv.row({site_str(M[i]), num(em.weights[i])});
    bool ok = true;
    for (double w : em.weights) ok = ok && w >= 0;
    return {std::string(rc.tilted ? "tilted " : "") + "capacity cap=" + num(em.total) + " |M|=" + std::to_string(M.size()),
            ok};
}

Outcome cmd_tilt_build(const RunConfig& rc, Csv& csv) {
    const auto prof = profile_of(rc);
    const int d = rc.exp.tilt.d;
    const int R = rc.profile_axis >= 0 ? rc.profile_axis : prof->support_radius() + 1;
    for (int i = 0; i <= R; ++i) {
        Site x = Site::zero(d);
        x[0] = i;
        csv.row({std::to_string(i), num(prof->hN(x)), num(prof->f(x)), num(prof->V(x)), num(prof->lambda(x))});
    }
    return {"tilt-build plateau=" + num(prof->plateau()) + " support_radius=" + std::to_string(prof->support_radius()) +
                " max|V|=" + num(prof->is_trivial() ? 0.0 : scan_max_abs_V(*prof)),
            true};
}

Outcome cmd_entropy(const RunConfig& rc, Csv& csv) {
    const auto prof = profile_of(rc);
    EntropyResult e;
    if (!prof->is_trivial()) e = entropy(*prof);
    csv.row({std::to_string(rc.exp.tilt.N), num(e.H_direct), num(e.H_formula), num(e.dirichlet)});
    const double rel = e.H_formula != 0 ? std::abs(e.H_direct - e.H_formula) / std::abs(e.H_formula) : 0.0;
    return {"entropy H=" + num(e.H_formula) + " H_direct=" + num(e.H_direct) + " rel_diff=" + num(rel), rel <= 1e-8};
}

Outcome cmd_dirichlet_scan(const RunConfig& rc, Csv& csv) {
    std::vector<int> Ns = rc.exp.N_list;
    if (Ns.empty()) Ns = {rc.exp.tilt.N};
    const auto rows = dirichlet_scan(rc.exp.tilt, Ns);
    std::string s = "dirichlet-scan";
    for (const auto& r : rows) {
        const double err = (r.scaled - r.target) / r.target;
        csv.row({std::to_string(r.N), num(r.scaled), num(r.target), num(err)});
        s += " N=" + std::to_string(r.N) + ":" + num(r.scaled);
    }
    return {s + " target=" + num(rows.empty() ? 0.0 : rows.front().target), true};
}

Outcome cmd_sample(const RunConfig& rc, Csv& csv) {
    const auto& e = rc.exp;
    const auto prof = profile_of(rc);
    const int R = e.window_for(*prof);
    const SiteSet M = rc.set_M == "origin" ? sup_ball(e.tilt.d, R) : parse_set(rc.set_M, e.tilt.d);
    InterlacementSampler sampler(M, prof, rc.tilted, e.escape_tol, R);
    struct Row {
        long long count, size;
        double F, w;
    };
    auto rows = run_replicas<Row>(e.replicas, e.threads, e.seed, 0, [&](long long, RngStream& rng) {
        const auto s = sampler.sample(e.tilt.u, rng);
        return Row{s.count, s.trace_size(), s.F, importance_weight(s, *prof)};
    });
    MeanAccumulator acc;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv.row({std::to_string(i), std::to_string(rows[i].count), std::to_string(rows[i].size), num(rows[i].F),
                 num(rows[i].w)});
        acc.add(rows[i].w);
    }
    return {std::string("sample ") + (rc.tilted ? "tilted" : "standard") + " window=" + std::to_string(R) +
                " mean_weight=" + num(acc.mean()) + " se=" + num(acc.std_error()),
            true};
}

Outcome cmd_disconnect_direct(const RunConfig& rc, Csv& csv) {
    std::vector<double> levels = rc.levels;
    if (levels.empty()) levels = {rc.exp.tilt.u};
    const auto rows = disconnect_direct_levels(rc.exp, levels, rc.exp.tilt.N);
    std::string s = "disconnect-direct";
    for (const auto& r : rows) {
        csv.row(concat({std::to_string(rc.exp.tilt.N), std::to_string(r.window_radius), num(r.u)}, estimator_cells(r.result)));
        s += " R=" + std::to_string(r.window_radius) + ",u=" + num(r.u) + ":" + num(r.result.estimate);
    }
    return {s, true};
}

Outcome cmd_disconnect_tilted(const RunConfig& rc, Csv& csv) {
    std::vector<int> Ns = rc.exp.N_list;
    if (Ns.empty()) Ns = {rc.exp.tilt.N};
    const auto tr = disconnect_tilted(rc.exp, Ns);
    std::string s = "disconnect-tilted";
    for (const auto& r : tr.rows) {
        csv.row(concat({std::to_string(r.N), std::to_string(r.window_radius)}, estimator_cells(r.result)));
        s += " N=" + std::to_string(r.N) + ":" + num(r.result.estimate);
    }
    s += tr.violation ? " trend=decreasing" : tr.inconclusive ? " trend=inconclusive" : " trend=nondecreasing";
    return {s, !tr.violation};
}

Outcome cmd_disconnect_is(const RunConfig& rc, Csv& csv) {
    const auto r = disconnect_is(rc.exp, rc.exp.tilt.N);
    csv.row(concat({std::to_string(rc.exp.tilt.N), std::to_string(r.window_radius), num(r.log_result.estimate),
                    num(r.log_result.std_error), num(r.tilted_frequency.estimate), num(r.ess), num(r.entropy),
                    num(r.entropy_bound), num(r.asymptotic_target)},
                   estimator_cells(r.linear)));
    return {"disconnect-is log_p=" + num(r.log_result.estimate) + " se=" + num(r.log_result.std_error) + " p=" +
                num(r.linear.estimate) + " ess=" + num(r.ess) + (r.unreliable ? " (unreliable)" : ""),
            true};
}

Outcome cmd_domination(const RunConfig& rc, Csv& csv) {
    const auto r = domination_report(rc.exp, rc.exp.tilt.N);
    for (const auto& p : r.points)
        csv.row({std::to_string(r.N), site_str(p.x), num(p.cap_B3), num(p.tilted_cap_B3), num(p.capacity_margin),
                 num(p.equilibrium_margin), num(p.entrance_ratio), num(p.entrance_margin), num(p.certificate),
                 num(r.occupation_residual)});
    return {"domination N=" + std::to_string(r.N) + " points=" + std::to_string(r.points.size()) + "/" +
                std::to_string(r.gamma_size) + " capacity_margin=" + num(r.min_capacity_margin) + " equilibrium_margin=" + num(r.min_equilibrium_margin) +
                " entrance_margin=" + num(r.min_entrance_margin) + " occupation_residual=" + num(r.occupation_residual),
            r.occupation_residual <= 1e-6};
}

Outcome cmd_alpha_beta(const RunConfig& rc, Csv& csv) {
    std::vector<int> Ns = rc.exp.N_list;
    if (Ns.empty()) Ns = {rc.exp.tilt.N};
    const auto scan = scan_alpha_beta(rc.exp, Ns);
    std::string s = "alpha-beta";
    for (const auto& r : scan.rows) {
        csv.row({std::to_string(r.N), num(r.alpha), site_str(r.alpha_argmax), num(r.beta), num(r.beta_plain), num(r.beta_mc),
                 num(r.beta_mc_se)});
        s += " N=" + std::to_string(r.N) + ":alpha=" + num(r.alpha) + ",beta=" + num(r.beta);
    }
    return {s + (scan.alpha_decreasing ? " alpha decreasing" : " alpha NOT decreasing"), true};
}

Outcome cmd_coupling(const RunConfig& rc, Csv& csv) {
    const auto r = coupling_check(rc.exp, rc.exp.tilt.N, rc.comparison_level);
    for (const auto& e : r.panel)
        csv.row({e.name, num(e.tilted.estimate), num(e.tilted.std_error), num(e.standard.estimate), num(e.standard.std_error),
                 e.violation ? "1" : "0"});
    csv.row({"trace size mean", num(r.tilted_trace_mean.estimate), num(r.tilted_trace_mean.std_error),
             num(r.standard_trace_mean.estimate), num(r.standard_trace_mean.std_error), r.trace_mean_dominates ? "0" : "1"});
    return {"coupling-check level=" + num(r.comparison_level) + " violations=" + std::to_string(r.violations) + "/" +
                std::to_string(r.panel.size()),
            r.violations == 0 && r.trace_mean_dominates};
}

struct Command {
    const char* name;
    const char* help;
    const char* units;
    std::vector<std::string> header;
    Outcome (*run)(const RunConfig&, Csv&);
};

const std::vector<Command>& commands() {
    static const std::vector<Command> c = {
        {"green", "Green function table on sets.M", "g in expected visits (dimensionless)", {"flavor", "x", "y", "g"}, cmd_green},
        {"capacity", "equilibrium measure and capacity of sets.M", "dimensionless", {"site", "weight"}, cmd_capacity},
        {"tilt-build", "tilt profile along the first axis", "h, f, lambda dimensionless; V per unit time",
         {"x1", "hN", "f", "V", "lambda"}, cmd_tilt_build},
        {"entropy", "relative entropy of the tilted law", "nats", {"N", "H_direct", "H_formula", "dirichlet"}, cmd_entropy},
        {"dirichlet-scan", "scaled Dirichlet energy against the capacity target", "dimensionless",
         {"N", "scaled", "target", "rel_error"}, cmd_dirichlet_scan},
        {"sample", "interlacement samples in the window", "count in trajectories, F dimensionless",
         {"replica", "count", "trace_size", "F", "weight"}, cmd_sample},
        {"disconnect-direct", "disconnection frequency under the standard law", "probability",
         concat({"N", "window_radius", "u"}, kEstimatorHeader), cmd_disconnect_direct},
        {"disconnect-tilted", "disconnection frequency under the tilted law", "probability",
         concat({"N", "window_radius"}, kEstimatorHeader), cmd_disconnect_tilted},
        {"disconnect-is", "importance-sampled disconnection probability", "log-probability in nats; probability",
         concat({"N", "window_radius", "log_estimate", "log_std_error", "tilted_frequency", "ess", "entropy", "entropy_bound",
                 "asymptotic_target"},
                kEstimatorHeader),
         cmd_disconnect_is},
        {"domination", "capacity and equilibrium-measure domination margins", "dimensionless",
         {"N", "x", "cap_B3", "tilted_cap_B3", "capacity_margin", "equilibrium_margin", "entrance_ratio", "entrance_margin",
          "certificate", "occupation_residual"},
         cmd_domination},
        {"alpha-beta", "occupation deviation alpha(N) and hitting probability beta(N)", "dimensionless",
         {"N", "alpha", "alpha_argmax", "beta", "beta_plain", "beta_mc", "beta_mc_se"}, cmd_alpha_beta},
        {"coupling-check", "domination panel of tilted against standard interlacements", "probability",
         {"event", "tilted", "tilted_se", "standard", "standard_se", "violation"}, cmd_coupling},
    };
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random interlacement disconnection experiments"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    int threads = 1;
    auto* seed_opt = app.add_option("--seed", seed, "top-level seed (overrides experiment.seed)");
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--set", sets, "override section.key=value (repeatable)")->take_all();
    app.fallthrough();
    std::vector<CLI::App*> subs;
    for (const auto& c : commands()) subs.push_back(app.add_subcommand(c.name, c.help));
    CLI11_PARSE(app, argc, argv);

    const Command* cmd = nullptr;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) cmd = &commands()[i];

    RunConfig rc;
    try {
        if (seed_opt->count() > 0) sets.push_back("experiment.seed=" + std::to_string(seed));
        rc = load_config(config_path, sets);
        rc.exp.threads = threads;
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    }

    const std::string hash = config_hash(cmd->name, rc);
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const std::string started = iso_now();
    Outcome res;
    try {
        Csv csv(out / "results.csv", hash, cmd->units, cmd->header);
        res = cmd->run(rc, csv);
    } catch (const std::exception& e) {
        std::cerr << cmd->name << ": " << e.what() << "\n";
        return 2;
    }
    nlohmann::ordered_json m;
    m["command"] = cmd->name;
    m["tool_version"] = kVersion;
    m["manifest_hash"] = hash;
    m["seed"] = rc.exp.seed;
    m["config"] = rc.resolved;
    m["threads"] = rc.exp.threads;
    m["started"] = started;
    m["finished"] = iso_now();
    m["outputs"] = {(out / "results.csv").string(), (out / "manifest.json").string()};
    m["invariants_ok"] = res.ok;
    std::ofstream(out / "manifest.json") << m.dump(2) << "\n";
    std::cout << res.summary << (res.ok ? "" : "  [INVARIANT VIOLATION]") << "\n";
    return res.ok ? 0 : 3;
}
