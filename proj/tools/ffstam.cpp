// ffstam: command-line front end for the finite free Stam lab.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffstam/aht.hpp"
#include "ffstam/clt.hpp"
#include "ffstam/coupling.hpp"
#include "ffstam/fisher_stam.hpp"
#include "ffstam/hermite.hpp"
#include "ffstam/io.hpp"
#include "ffstam/search.hpp"

namespace fs = std::filesystem;
using namespace ffstam;

namespace {

struct Global {
    std::string out;
    std::optional<int> digits;
};

struct Run {
    fs::path dir;
    RunManifest manifest;

    fs::path output(const std::string& name) {
        manifest.outputs.push_back((dir / name).string());
        return dir / name;
    }
};

// --digits, then FFSTAM_DIGITS, then the command's own default.
PrecisionContext resolve_precision(const Global& g, int fallback, std::string& source) {
    if (g.digits) {
        source = "flag";
        return PrecisionContext::with_digits(*g.digits);
    }
    if (const char* env = std::getenv("FFSTAM_DIGITS"); env && *env) {
        source = "FFSTAM_DIGITS";
        return PrecisionContext::from_environment();
    }
    source = "default";
    return PrecisionContext::with_digits(fallback);
}

bool precision_overridden(const Global& g) {
    const char* env = std::getenv("FFSTAM_DIGITS");
    return g.digits.has_value() || (env && *env);
}

template <class Real>
Real parse_real(const std::string& s) {
    if constexpr (std::is_same_v<Real, double>) {
        return std::stod(s);
    } else {
        return Real(s);
    }
}

template <class Real>
std::string text(const Real& x, int digits) {
    return detail::to_text(x, std::min(digits, 20));
}

// ---------------------------------------------------------------------------

struct HermiteArgs {
    std::size_t n = 0;
};

void cmd_hermite(const HermiteArgs& a, const Global& g, Run& run) {
    std::string src;
    const auto ctx = resolve_precision(g, 30, src);
    run.manifest.precision = precision_json(ctx, src);
    run.manifest.config = {{"n", a.n}};
    const auto roots = with_precision(ctx, [&]<class Real>() {
        std::vector<std::string> out;
        const auto h = hermite_roots<Real>(a.n, ctx);
        for (const auto& x : h.values()) out.push_back(text(x, ctx.digits));
        return out;
    });
    CsvWriter csv(run.output("hermite.csv"), {"i", "root"}, {"normalized Hermite roots, n=" + std::to_string(a.n)});
    for (std::size_t i = 0; i < roots.size(); ++i) {
        csv.row({std::to_string(i + 1), roots[i]});
        std::cout << roots[i] << '\n';
    }
}

struct DeficitArgs {
    std::size_t n = 0;
    std::string p;
    std::string alpha, beta;
};

void cmd_deficit(const DeficitArgs& a, const Global& g, Run& run) {
    std::string src;
    const auto ctx = resolve_precision(g, 30, src);
    run.manifest.precision = precision_json(ctx, src);
    run.manifest.config = {{"n", a.n}, {"p", a.p}, {"alpha", a.alpha}, {"beta", a.beta}};
    const auto alpha = read_roots_file(a.alpha);
    const auto beta = read_roots_file(a.beta);
    if (alpha.size() != a.n || beta.size() != a.n) {
        throw DegreeMismatch("deficit: expected " + std::to_string(a.n) + " roots, got " +
                             std::to_string(alpha.size()) + " and " + std::to_string(beta.size()));
    }
    const json rep = with_precision(ctx, [&]<class Real>() {
        std::vector<Real> ra, rb;
        for (double x : alpha) ra.push_back(Real(x));
        for (double x : beta) rb.push_back(Real(x));
        const auto r = stam_deficit(RootConfig<Real>::from_unsorted(ra), RootConfig<Real>::from_unsorted(rb),
                                    parse_real<Real>(a.p), ctx);
        json j;
        for (auto [k, v] : {std::pair{"p", &r.p}, {"g_p", &r.g_p}, {"A_p", &r.A_p}, {"rho_p", &r.rho_p},
                            {"phi_f", &r.phi_f}, {"phi_g", &r.phi_g}, {"phi_conv", &r.phi_conv}}) {
            j[k] = text(*v, ctx.digits);
        }
        return j;
    });
    write_text(run.output("deficit.json"), rep.dump(2) + "\n");
    std::cout << rep.dump(2) << '\n';
}

struct AuditArgs {
    std::vector<std::size_t> n_list;
    std::vector<std::string> schedule;
};

void cmd_spectrum_audit(const AuditArgs& a, const Global& g, Run& run) {
    std::map<std::size_t, int> sched;
    for (const auto& item : a.schedule) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InvalidArgument("schedule entries look like N:DIGITS, got '" + item + "'");
        try {
            sched[std::stoul(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw InvalidArgument("bad schedule entry '" + item + "'");
        }
    }
    std::string src = "schedule";
    if (precision_overridden(g)) {
        std::string s;
        const auto ctx = resolve_precision(g, 30, s);
        for (auto n : a.n_list)
            if (!sched.count(n)) sched[n] = ctx.digits;
        src = s;
    }
    json used = json::object();
    for (auto n : a.n_list) used[std::to_string(n)] = sched.count(n) ? sched[n] : default_audit_digits(n);
    run.manifest.precision = {{"digits_by_n", used}, {"source", src}};
    run.manifest.config = {{"n_list", a.n_list}, {"schedule", a.schedule}};

    const auto reps = spectrum_audit(a.n_list, sched);
    CsvWriter modes(run.output("spectrum_audit.csv"), {"n", "digits", "k", "sigma", "sigma_text", "target", "rel_err"});
    CsvWriter summary(run.output("spectrum_summary.csv"),
                      {"n", "digits", "sigma_1", "max_rel_err_first10", "symmetry_defect", "stochasticity_defect"});
    CsvWriter eig(run.output("eigenvalues.csv"), {"n", "k", "eigenvalue"});
    std::cout << "n  digits  sigma_1       max_rel_err   sym_defect\n";
    for (const auto& r : reps) {
        for (std::size_t k = 0; k < r.sigma.size(); ++k) {
            const double target = std::pow(2.0, -0.5 * static_cast<double>(k + 1));
            modes.row({std::to_string(r.n), std::to_string(r.digits), std::to_string(k + 1), fmt(r.sigma[k]),
                       r.sigma_text[k], fmt(target), fmt(std::abs(r.sigma[k] - target) / target)});
        }
        for (std::size_t k = 0; k < r.eigenvalues.size(); ++k)
            eig.row({std::to_string(r.n), std::to_string(k + 1), fmt(r.eigenvalues[k])});
        summary.row({std::to_string(r.n), std::to_string(r.digits), fmt(r.sigma.front()), fmt(r.max_rel_err_first10),
                     fmt(r.symmetry_defect), fmt(r.stochasticity_defect)});
        std::cout << r.n << "  " << r.digits << "  " << std::setprecision(9) << std::fixed << r.sigma.front() << "  "
                  << std::scientific << std::setprecision(2) << r.max_rel_err_first10 << "  " << r.symmetry_defect
                  << std::defaultfloat << '\n';
    }
}

struct CltArgs {
    std::size_t n = 0;
    std::string dir = "e2";
    std::string eps = "1e-3";
    std::size_t steps = 20;
};

void cmd_clt(const CltArgs& a, const Global& g, Run& run) {
    std::string src;
    const auto ctx = resolve_precision(g, default_audit_digits(a.n), src);
    run.manifest.precision = precision_json(ctx, src);
    run.manifest.config = {{"n", a.n}, {"dir", a.dir}, {"eps", a.eps}, {"steps", a.steps}};
    const std::size_t k = a.dir == "e1" ? 1 : 2;
    struct Out {
        std::vector<std::pair<std::size_t, std::string>> rows;
        double rate;
        std::pair<std::size_t, std::size_t> window;
    };
    const Out res = with_precision(ctx, [&]<class Real>() {
        const auto f0 = perturbed_hermite<Real>(a.n, k, parse_real<Real>(a.eps), ctx);
        const auto traj = clt_trajectory(f0, a.steps, ctx);
        Out o{{}, traj.fitted_rate, traj.fit_window};
        for (const auto& s : traj.steps) o.rows.emplace_back(s.k, text(s.d_H, ctx.digits));
        return o;
    });
    CsvWriter csv(run.output("clt_trajectory.csv"), {"k", "d_H"},
                  {"n=" + std::to_string(a.n), "direction=" + a.dir, "eps=" + a.eps,
                   "digits=" + std::to_string(ctx.digits), "fit_window=" + std::to_string(res.window.first) + ".." +
                                                                std::to_string(res.window.second),
                   "fitted_rate=" + fmt(res.rate)});
    for (const auto& [kk, d] : res.rows) csv.row({std::to_string(kk), d});
    run.manifest.metadata["fitted_rate"] = res.rate;
    std::cout << "fitted_rate " << fmt(res.rate) << "  (1/sqrt(2) = 0.7071067812)\n";
}

SearchConfig load_search_config(const std::string& path, std::optional<std::uint64_t> seed) {
    SearchConfig c = search_config_from_json(read_json_file(path));
    if (seed) c.seed = *seed;
    return c;
}

struct SearchArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
};

void cmd_search(const SearchArgs& a, const Global&, Run& run) {
    const SearchConfig cfg = load_search_config(a.config, a.seed);
    run.manifest.config = to_json(cfg);
    run.manifest.seed = cfg.seed;
    run.manifest.precision = {{"search", "double"}, {"revalidation_digits", 50}};
    const auto res = closed_loop_run(cfg);
    write_elites(run.output("elites.jsonl"), res.buffer, cfg.n, cfg.p, cfg.objective);
    CsvWriter rounds(run.output("rounds.csv"), {"round", "best_objective"});
    for (std::size_t r = 0; r < res.best_per_round.size(); ++r)
        rounds.row({std::to_string(r + 1), fmt(res.best_per_round[r])});
    run.manifest.metadata["evaluations"] = res.stats.evaluations;
    run.manifest.metadata["failures"] = res.stats.failures;
    run.manifest.metadata["accepted"] = res.stats.accepted;
    if (res.buffer.empty()) throw EmptyElites("search: no feasible sample was evaluated");
    const auto& best = res.buffer.best();
    const auto hp = evaluate_pair<mpfr_real<50>>(best.alpha, best.beta, cfg.p);
    json b = elite_record(best, cfg.n, cfg.p, cfg.objective);
    b["g_p_50"] = detail::to_text(hp.g_p, 20);
    b["rho_p_50"] = detail::to_text(hp.rho_p, 20);
    write_text(run.output("best.json"), b.dump(2) + "\n");
    std::cout << "best " << to_string(cfg.objective) << " = " << fmt(best.objective) << "  g_p(50 digits) = "
              << detail::to_text(hp.g_p, 12) << "  D = " << fmt(best.diag.D) << "  d_PQ = " << fmt(best.diag.d_PQ)
              << "\nelites: " << res.buffer.size() << "  evaluations: " << res.stats.evaluations
              << "  failures: " << res.stats.failures << '\n';
}

void cmd_sweep(const SearchArgs& a, const Global&, Run& run) {
    const SweepConfig sc = sweep_config_from_json(read_json_file(a.config));
    SearchConfig tmpl = sc.tmpl;
    if (a.seed) tmpl.seed = *a.seed;
    json cj = to_json(tmpl);
    cj.erase("n");
    cj.erase("p");
    cj["n_list"] = sc.n_list;
    cj["p_list"] = sc.p_list;
    run.manifest.config = cj;
    run.manifest.seed = tmpl.seed;
    run.manifest.precision = {{"search", "double"}, {"revalidation_digits", 50}};
    const auto cells = sweep(sc.grid(), tmpl);
    fs::create_directories(run.dir / "elites");
    CsvWriter csv(run.output("sweep.csv"),
                  {"n", "p", "ok", "error", "min_objective", "g_p_min", "g_p_min_50", "rho_p_min", "heat",
                   "sign_confirmed", "D", "d_PQ", "evaluations", "failures"});
    std::cout << "n   p        g_p_min(50 digits)   heat\n";
    for (const auto& c : cells) {
        std::ostringstream name;
        name << "elites/n" << c.n << "_p" << fmt(c.p) << ".jsonl";
        if (c.ok) write_elites(run.output(name.str()), c.elites, c.n, c.p, tmpl.objective);
        csv.row({std::to_string(c.n), fmt(c.p), c.ok ? "1" : "0", c.error, fmt(c.min_objective), fmt(c.g_p_min),
                 fmt(c.g_p_min_hp), fmt(c.rho_p_min), fmt(c.heat), c.sign_confirmed ? "1" : "0", fmt(c.diag.D),
                 fmt(c.diag.d_PQ), std::to_string(c.stats.evaluations), std::to_string(c.stats.failures)});
        std::cout << c.n << "  " << std::left << std::setw(8) << fmt(c.p) << " " << std::setw(20)
                  << (c.ok ? fmt(c.g_p_min_hp) : c.error) << " " << fmt(c.heat) << std::right << '\n';
    }
}

struct AhtArgs {
    std::string elites;
    std::vector<std::string> families;
    std::size_t top = kDefaultScreenSize;
    std::vector<double> t_list{0.05, 0.1, 0.2};
};

void cmd_aht(const AhtArgs& a, const Global&, Run& run) {
    const EliteFile ef = read_elites(a.elites);
    if (ef.entries.empty()) throw EmptyElites("aht: " + a.elites + " has no entries");
    std::vector<FamilySpec> lib;
    if (a.families.empty()) lib = default_library();
    for (const auto& f : a.families) lib.push_back(parse_family(f));
    run.manifest.config = {{"elites", a.elites}, {"families", a.families}, {"top", a.top}, {"t", a.t_list}};
    run.manifest.precision = {{"screening", "double"}};
    run.manifest.metadata["caveat"] = kEliteCaveat;
    run.manifest.metadata["symmetry_classes"] =
        "interpretations: S1 = reflection symmetry r ~ -rev(r) per polynomial; S2 = vanishing odd normalized "
        "moments per polynomial; S3 = d_PQ < t; S4 = rms(alpha + rev(beta)) < t";

    CsvWriter t8(run.output("table8.csv"),
                 {"n", "p", "family", "m_eff", "wins", "ties", "e_value", "log10_e_value", "decision", "favoured"},
                 {std::string("caveat: elite population is ") + kEliteCaveat});
    std::cout << "family                  m_eff  wins  e_value       favoured\n";
    for (const auto& f : lib) {
        if (f.kind == Family::Hermite) continue;  // the baseline itself
        const auto r = screen_family(ef.entries, f, ef.p, a.top);
        t8.row({std::to_string(r.n), fmt(r.p), f.name(), std::to_string(r.m_eff), std::to_string(r.wins),
                std::to_string(r.ties), fmt(r.e_value), fmt(r.log10_e_value), to_string(r.decision),
                to_string(r.favoured)});
        std::cout << std::left << std::setw(24) << f.name() << std::right << std::setw(5) << r.m_eff << std::setw(6)
                  << r.wins << "  " << std::setw(12) << fmt(r.e_value) << "  " << to_string(r.favoured) << '\n';
    }

    const auto s = summarize_elites(ef.entries, lib, a.t_list, a.top);
    std::vector<std::string> head{"n", "p", "size", "best_family", "median_d_joint", "consistency", "best_d_PQ", "best_D"};
    std::vector<std::string> row{std::to_string(s.n), fmt(ef.p), std::to_string(s.size), s.best_family.name(),
                                 fmt(s.median_d_joint), fmt(s.consistency), fmt(s.best_d_PQ), fmt(s.best_D)};
    for (const auto& [key, frac] : s.sym_fractions) {
        head.push_back(key.first + "_t" + fmt(key.second));
        row.push_back(fmt(frac));
    }
    CsvWriter t6(run.output("table6.csv"), head, {std::string("caveat: elite population is ") + kEliteCaveat});
    t6.row(row);

    CsvWriter fr(run.output("family_residuals.csv"), {"family", "median_d_joint", "argmin_count"});
    for (std::size_t i = 0; i < s.family_medians.size(); ++i)
        fr.row({s.family_medians[i].first.name(), fmt(s.family_medians[i].second), std::to_string(s.argmin_counts[i])});

    CsvWriter ob(run.output("order_bands.csv"), {"i", "q10", "q25", "q50", "q75", "q90"});
    for (const auto& b : order_statistic_bands(ef.entries, a.top))
        ob.row({std::to_string(b.index), fmt(b.q10), fmt(b.q25), fmt(b.q50), fmt(b.q75), fmt(b.q90)});

    if (ef.n >= 3) {
        CsvWriter gs(run.output("gap_statistics.csv"), {"rank", "objective", "gap_alpha", "gap_beta"});
        const auto top = detail::top_entries(ef.entries, a.top);
        for (std::size_t i = 0; i < top.size(); ++i)
            gs.row({std::to_string(i + 1), fmt(top[i].objective), fmt(gap_statistic(normalize_shape(top[i].alpha))),
                    fmt(gap_statistic(normalize_shape(top[i].beta)))});
    }
    std::cout << "best family " << s.best_family.name() << "  consistency " << fmt(s.consistency) << "  median d_joint "
              << fmt(s.median_d_joint) << "  S3(t=0.1) "
              << (s.sym_fractions.count({"S3", 0.1}) ? fmt(s.sym_fractions.at({"S3", 0.1})) : "n/a") << '\n'
              << "note: elite population is " << kEliteCaveat << '\n';
}

struct ReportArgs {
    std::string run_dir;
};

void cmd_report(const ReportArgs& a, const Global&, Run& run) {
    const fs::path root(a.run_dir);
    if (!fs::is_directory(root)) throw IoError("report: not a directory: " + a.run_dir);
    run.manifest.config = {{"run", a.run_dir}};
    std::vector<fs::path> manifests;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() == "manifest.json") manifests.push_back(e.path());
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) throw IoError("report: no manifest.json under " + a.run_dir);

    std::ostringstream md;
    md << "# ffstam run report\n\nSource: `" << a.run_dir << "`\n";
    for (const auto& mpath : manifests) {
        if (fs::equivalent(mpath.parent_path(), run.dir)) continue;
        const json m = read_json_file(mpath);
        md << "\n## " << m.value("command", "?") << " (" << mpath.parent_path().string() << ")\n\n"
           << "- status: " << m.value("status", "?") << "\n- version: " << m.value("version", "?")
           << "\n- started: " << m.value("started_utc", "?") << "\n- wall seconds: " << m.value("wall_seconds", 0.0)
           << "\n- seed: " << m.value("seed", 0) << "\n- precision: " << m.at("precision").dump()
           << "\n- config: `" << m.at("config").dump() << "`\n";
        if (m.contains("metadata") && !m.at("metadata").empty()) md << "- metadata: `" << m.at("metadata").dump() << "`\n";
        if (!m.at("error").is_null()) md << "- error: `" << m.at("error").dump() << "`\n";
        for (const auto& o : m.at("outputs")) {
            const fs::path p = o.get<std::string>();
            if (!fs::exists(p)) {
                md << "\n`" << p.filename().string() << "`: missing\n";
                continue;
            }
            std::ifstream in(p);
            std::vector<std::string> lines;
            for (std::string l; std::getline(in, l);) lines.push_back(l);
            md << "\n`" << p.filename().string() << "` (" << lines.size() << " lines)\n\n```\n";
            const std::size_t shown = p.extension() == ".jsonl" ? 1 : 40;
            for (std::size_t i = 0; i < std::min(shown, lines.size()); ++i) md << lines[i] << '\n';
            if (lines.size() > shown) md << "...\n";
            md << "```\n";
        }
    }
    write_text(run.output("report.md"), md.str());
    std::cout << md.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite free Stam lab"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--out", g.out, "output directory (default ffstam_out/<command>)");
    app.add_option("--digits", g.digits, "working precision in decimal digits (overrides FFSTAM_DIGITS)");
    app.set_version_flag("--version", std::string(kToolVersion));

    HermiteArgs ha;
    auto* hermite = app.add_subcommand("hermite", "normalized Hermite roots");
    hermite->add_option("--n", ha.n)->required()->check(CLI::Range(2, 100000));

    DeficitArgs da;
    auto* deficit = app.add_subcommand("deficit", "p-Stam deficit of a root pair");
    deficit->add_option("--n", da.n)->required();
    deficit->add_option("--p", da.p)->required();
    deficit->add_option("--alpha", da.alpha)->required();
    deficit->add_option("--beta", da.beta)->required();

    AuditArgs aa;
    auto* audit = app.add_subcommand("spectrum-audit", "singular values of the coupling matrix on W");
    audit->add_option("--n-list", aa.n_list)->required()->delimiter(',');
    audit->add_option("--schedule", aa.schedule, "N:DIGITS pairs, e.g. 10:60,20:80")->delimiter(',');

    CltArgs ca;
    auto* clt = app.add_subcommand("clt", "finite free CLT trajectory from a perturbed Hermite start");
    clt->add_option("--n", ca.n)->required()->check(CLI::Range(3, 100000));
    clt->add_option("--dir", ca.dir)->check(CLI::IsMember({"e1", "e2"}));
    clt->add_option("--eps", ca.eps);
    clt->add_option("--steps", ca.steps);

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "closed-loop extremal search");
    search->add_option("--config", sa.config)->required();
    search->add_option("--seed", sa.seed, "override the config seed");

    SearchArgs wa;
    auto* sweep_cmd = app.add_subcommand("sweep", "search over an (n, p) grid");
    sweep_cmd->add_option("--config", wa.config)->required();
    sweep_cmd->add_option("--seed", wa.seed, "override the config seed");

    AhtArgs ta;
    auto* aht = app.add_subcommand("aht", "screen an elite file against the family library");
    aht->add_option("--elites", ta.elites)->required();
    aht->add_option("--families", ta.families, "e.g. 2BU,SC,Jacobi(1,1); default: whole library")->delimiter(',');
    aht->add_option("--top", ta.top, "screen the best N elites");
    aht->add_option("--t", ta.t_list, "symmetry thresholds")->delimiter(',');

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "consolidated summary of a run directory");
    report->add_option("--run", ra.run_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_json("InvalidArgument", e.what()).dump() << '\n';
        return e.get_exit_code() ? e.get_exit_code() : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    Run run;
    run.manifest.command = sub->get_name();
    run.manifest.argv.assign(argv, argv + argc);
    run.dir = g.out.empty() ? fs::path("ffstam_out") / sub->get_name() : fs::path(g.out);
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        fs::create_directories(run.dir);
        if (sub == hermite) cmd_hermite(ha, g, run);
        else if (sub == deficit) cmd_deficit(da, g, run);
        else if (sub == audit) cmd_spectrum_audit(aa, g, run);
        else if (sub == clt) cmd_clt(ca, g, run);
        else if (sub == search) cmd_search(sa, g, run);
        else if (sub == sweep_cmd) cmd_sweep(wa, g, run);
        else if (sub == aht) cmd_aht(ta, g, run);
        else if (sub == report) cmd_report(ra, g, run);
    } catch (const Error& e) {
        run.manifest.status = "error";
        run.manifest.error = error_json(category_name(e.category()), e.what())["error"];
        code = 2;
    } catch (const fs::filesystem_error& e) {
        run.manifest.status = "error";
        run.manifest.error = error_json("IoError", e.what())["error"];
        code = 2;
    } catch (const std::exception& e) {
        run.manifest.status = "error";
        run.manifest.error = error_json("Internal", e.what())["error"];
        code = 3;
    }
    run.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (code != 0) std::cerr << json{{"error", run.manifest.error}}.dump() << '\n';
    try {
        if (fs::is_directory(run.dir)) run.manifest.write(run.dir);
    } catch (const Error& e) {
        std::cerr << error_json(category_name(e.category()), e.what()).dump() << '\n';
        if (code == 0) code = 2;
    }
    return code;
}
