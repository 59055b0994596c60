#include "qdport/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qdport/analytics.hpp"
#include "qdport/io.hpp"
#include "qdport/kernels.hpp"
#include "qdport/selection.hpp"
#include "qdport/synth.hpp"

namespace qdport {
namespace {

using io::json;

struct EstimatorFlags {
    std::string method = "ledoit-wolf";
    std::string mean = "capm";
    std::string market = "equal";
    double rf = 0.0;
    int days_per_year = kTradingDaysPerYear;

    void add(CLI::App* app) {
        app->add_option("--method", method, "Covariance estimator")
            ->check(CLI::IsMember({"sample", "ledoit-wolf"}));
        app->add_option("--mean", mean, "Expected-return estimator")->check(CLI::IsMember({"sample", "capm"}));
        app->add_option("--market", market, "CAPM market proxy: equal, cap, or a date,market CSV");
        app->add_option("--rf", rf, "Risk-free rate, decimal per year");
        app->add_option("--days-per-year", days_per_year, "Trading days per year")->check(CLI::PositiveNumber);
    }

    EstimatorSettings settings() const {
        EstimatorSettings s;
        s.covariance = method == "sample" ? CovarianceMethod::sample : CovarianceMethod::ledoit_wolf;
        s.mean = mean == "sample" ? MeanMethod::sample : MeanMethod::capm;
        if (market == "cap") {
            s.proxy = MarketProxy::cap_weight;
        } else if (market != "equal") {
            s.external_market = io::read_market_csv(market);
        }
        s.rf = rf;
        s.trading_days_per_year = days_per_year;
        return s;
    }

    bool needs_caps() const { return mean == "capm" && market == "cap"; }
};

std::vector<double> caps_for(const std::string& universe_path, const ReturnsWindow& win) {
    if (universe_path.empty()) return {};
    return io::align_universe(io::read_universe_csv(universe_path), win.names).market_cap;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

ReferenceRule parse_reference(const std::string& text) {
    if (text == "max_sharpe" || text == "max-sharpe") return ReferenceRule::tangency(0.0);
    if (text.rfind("gamma:", 0) == 0) return ReferenceRule::risk_aversion(std::stod(text.substr(6)));
    if (text.rfind("weights:", 0) == 0) return ReferenceRule::fixed(Portfolio(io::parse_doubles(text.substr(8))));
    throw DataError("reference must be max_sharpe, gamma:<value> or weights:<w1,...,wN>");
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return std::nan("");
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------

int run_estimate(const std::string& preset, const std::string& returns, const std::string& universe,
                 const EstimatorFlags& flags, long window, const std::string& out_path, std::ostream& out) {
    Estimates est;
    if (preset == "toy") {
        est = toy_estimates();
    } else {
        if (returns.empty()) throw CLI::ValidationError("estimate", "--returns or --preset toy is required");
        ReturnsWindow win = io::read_returns_csv(returns);
        if (window > 0) win = win.trailing(window);
        if (flags.needs_caps() && universe.empty())
            throw CLI::ValidationError("estimate", "--market cap needs --universe");
        est = estimate(win, flags.settings(), caps_for(universe, win));
        est.validate();
    }
    io::save_estimates(out_path, est);
    out << "wrote " << out_path << " (" << est.size() << " assets, checksum " << io::checksum(est) << ")\n";
    return kExitOk;
}

int run_frontier(const std::string& est_path, std::size_t points, const std::string& out_path, std::ostream& out) {
    const Estimates est = io::load_estimates(est_path);
    const auto pts = efficient_frontier(est, points);
    io::write_frontier_csv(out_path, pts);
    out << "wrote " << pts.size() << " frontier points to " << out_path << '\n';
    return kExitOk;
}

int run_fit_gamma(const std::string& est_path, const std::string& weights, std::ostream& out) {
    const Estimates est = io::load_estimates(est_path);
    const GammaFit fit = fit_gamma(est, Portfolio(io::parse_doubles(weights)));
    const RiskReturnPoint rr = risk_return(fit.w, est);
    print_json(out, {{"gamma", fit.gamma},
                     {"weights", fit.w.vec()},
                     {"max_abs_error", fit.max_abs_error},
                     {"mu", rr.mu},
                     {"sigma", rr.sigma}});
    return kExitOk;
}

struct QdRunArgs {
    std::string config_path, estimates, universe, reference, out, partition_out, snapshots_out, manifest_out,
        metrics_out, cvt_sampler, fitness, behavior;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> niches, n_max, n_cvt, batch;
    std::optional<double> p_init, mutation, c, rf;
    std::optional<unsigned> threads;
    std::string w0;
    std::optional<double> gamma;
    bool max_sharpe = false;
    bool quiet = false;
};

int run_qd_cmd(const QdRunArgs& a, std::ostream& out) {
    const auto started = std::chrono::steady_clock::now();
    QdConfig cfg;
    std::map<std::string, std::string> extra;
    if (!a.config_path.empty()) extra = io::apply_config(cfg, io::read_key_values(a.config_path));
    auto pick = [&](const std::string& flag, const char* key) {
        if (!flag.empty()) return flag;
        const auto it = extra.find(key);
        return it == extra.end() ? std::string{} : it->second;
    };
    if (a.seed) cfg.seed = *a.seed;
    if (a.niches) cfg.niches = *a.niches;
    if (a.n_max) cfg.n_max = *a.n_max;
    if (a.n_cvt) cfg.n_cvt = *a.n_cvt;
    if (a.batch) cfg.batch = *a.batch;
    if (a.p_init) cfg.p_init = *a.p_init;
    if (a.mutation) cfg.mutation = *a.mutation;
    if (a.c) cfg.c = *a.c;
    if (a.rf) cfg.rf = *a.rf;
    if (a.threads) cfg.threads = *a.threads;
    if (!a.fitness.empty()) cfg.fitness = parse_fitness(a.fitness);
    if (!a.behavior.empty()) cfg.behavior = parse_behavior(a.behavior);
    if (!a.cvt_sampler.empty()) cfg.cvt_sampler = parse_sampler(a.cvt_sampler);
    if (cfg.threads > 1 && cfg.batch == 0) cfg.batch = 256;
    cfg.validate();

    const std::string est_path = pick(a.estimates, "estimates");
    if (est_path.empty()) throw CLI::ValidationError("qd-run", "--estimates (or config key estimates) is required");
    const Estimates est = io::load_estimates(est_path);

    std::optional<AssetUniverse> universe;
    const std::string uni_path = pick(a.universe, "universe");
    if (!uni_path.empty()) {
        AssetUniverse u = io::read_universe_csv(uni_path);
        universe = est.names.empty() ? u : io::align_universe(u, est.names);
    }

    ReferenceRule rule = ReferenceRule::tangency(cfg.rf);
    if (!a.w0.empty()) {
        rule = ReferenceRule::fixed(Portfolio(io::parse_doubles(a.w0)));
    } else if (a.gamma) {
        rule = ReferenceRule::risk_aversion(*a.gamma);
    } else if (!a.max_sharpe) {
        if (const std::string r = pick("", "reference"); !r.empty()) rule = parse_reference(r);
        if (rule.kind == ReferenceRule::Kind::max_sharpe) rule.rf = cfg.rf;
    }
    const Portfolio w0 = rule.resolve(est);

    RunOptions opts;
    if (!a.quiet) {
        opts.on_snapshot = [&](const Snapshot& s) {
            if (s.evals % (cfg.snapshot_every * 10) == 0)
                std::cerr << "evals " << s.evals << "  occupied " << s.occupied << "  coverage " << s.coverage << '\n';
        };
    }
    QdResult result = run_qd(cfg, est, universe ? &*universe : nullptr, w0, opts);

    io::ArchiveFile file;
    file.config = cfg;
    file.reference = rule;
    file.w0 = result.w0;
    file.rr0 = result.rr0;
    file.estimates_checksum = io::checksum(est);
    file.universe_checksum = universe ? io::checksum(*universe) : "";
    file.archive = std::move(result.archive);
    io::save_archive(a.out, file);
    if (!a.partition_out.empty()) io::save_partition(a.partition_out, file.archive.partition());
    if (!a.snapshots_out.empty()) io::write_snapshots_csv(a.snapshots_out, result.snapshots);

    const MetricsReport metrics = compute_metrics(file.archive, est, cfg.rf);
    if (!a.metrics_out.empty()) io::write_text(a.metrics_out, io::to_json(metrics).dump(2) + "\n");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!a.manifest_out.empty()) {
        json manifest = {{"run_id", std::to_string(cfg.seed) + "-" + file.estimates_checksum},
                         {"config", io::to_json(cfg)},
                         {"reference", io::to_json(rule)},
                         {"estimates_path", est_path},
                         {"estimates_checksum", file.estimates_checksum},
                         {"universe_path", uni_path},
                         {"universe_checksum", file.universe_checksum},
                         {"archive_path", a.out},
                         {"archive_checksum", io::file_checksum(a.out)},
                         {"metrics_path", a.metrics_out},
                         {"kernels", std::string(kernels::level_name(kernels::active_level()))},
                         {"wall_clock_seconds", seconds}};
        io::write_text(a.manifest_out, manifest.dump(2) + "\n");
    }
    out << "wrote " << a.out << ": " << file.archive.occupied() << "/" << file.archive.niches()
        << " niches occupied, coverage " << metrics.coverage_mod << ", " << file.archive.eval_count()
        << " evaluations in " << seconds << " s\n";
    return kExitOk;
}

Estimates load_checked_estimates(const std::string& path, const io::ArchiveFile& file) {
    Estimates est = io::load_estimates(path);
    if (!file.estimates_checksum.empty() && io::checksum(est) != file.estimates_checksum)
        throw DataError("estimates checksum " + io::checksum(est) + " does not match the archive's " +
                        file.estimates_checksum);
    return est;
}

int run_metrics(const std::string& archive, const std::string& est_path, std::optional<double> rf, std::size_t points,
                const std::string& out_path, const std::string& csv_path, std::ostream& out) {
    const io::ArchiveFile file = io::load_archive(archive);
    const Estimates est = load_checked_estimates(est_path, file);
    const MetricsReport m = compute_metrics(file.archive, est, rf.value_or(file.config.rf), points);
    const json j = io::to_json(m);
    if (!out_path.empty()) io::write_text(out_path, j.dump(2) + "\n");
    if (!csv_path.empty()) io::write_metrics_csv(csv_path, m);
    if (out_path.empty()) {
        print_json(out, j);
    } else {
        out << "coverage " << m.coverage_mod << ", qd_score1 " << m.qd_score1 << ", qd_score_mod " << m.qd_score_mod
            << '\n';
    }
    return kExitOk;
}

int run_sweep(const std::string& archive, const std::string& returns, const std::string& universe,
              const EstimatorFlags& flags, const std::string& t_grid, const std::string& c_grid,
              const std::string& out_path, std::ostream& out) {
    const io::ArchiveFile file = io::load_archive(archive);
    const ReturnsWindow win = io::read_returns_csv(returns);
    std::vector<Eigen::Index> ts;
    for (double t : io::parse_doubles(t_grid)) ts.push_back(static_cast<Eigen::Index>(t));
    const std::vector<double> cs = io::parse_doubles(c_grid);
    if (flags.needs_caps() && universe.empty()) throw CLI::ValidationError("sweep", "--market cap needs --universe");
    const SweepResult s =
        robustness_sweep(file.archive, win, ts, cs, flags.settings(), file.reference, caps_for(universe, win));
    io::write_sweep_csv(out_path, s);
    out << "wrote " << ts.size() << "x" << cs.size() << " sweep to " << out_path << '\n';
    return kExitOk;
}

int run_select(const std::string& archive, const std::string& bd, std::ostream& out) {
    const io::ArchiveFile file = io::load_archive(archive);
    const Selection s = select_portfolio(file.archive, io::parse_doubles(bd));
    const auto& rec = *file.archive.slot(s.niche);
    print_json(out, {{"niche", s.niche},
                     {"direct_hit", s.direct_hit},
                     {"weights", s.w.vec()},
                     {"mu", rec.rr.mu},
                     {"sigma", rec.rr.sigma},
                     {"fitness", rec.fitness},
                     {"near_optimal", rec.near_optimal}});
    return kExitOk;
}

int run_synth(const SynthParams& p, const std::string& returns_out, const std::string& universe_out,
              const std::string& market_out, std::ostream& out) {
    const SyntheticMarket m = generate_synthetic_universe(p);
    io::write_returns_csv(returns_out, m.window);
    io::write_universe_csv(universe_out, m.universe);
    if (!market_out.empty()) io::write_market_csv(market_out, m.window.dates, m.market);
    out << "wrote " << p.assets << " assets x " << p.days << " days to " << returns_out << '\n';
    return kExitOk;
}

int run_report(const std::vector<std::string>& snapshots, const std::vector<std::string>& archives,
               std::size_t points, const std::string& out_path, const std::string& profiles_path, std::ostream& out) {
    if (!snapshots.empty()) {
        std::vector<std::vector<Snapshot>> runs;
        for (const auto& p : snapshots) runs.push_back(io::read_snapshots_csv(p));
        std::ofstream csv(out_path);
        if (!csv) throw DataError("cannot write " + out_path);
        csv << "evals,metric,mean,p5,p95,runs\n";
        std::map<std::size_t, std::vector<const Snapshot*>> by_step;
        for (const auto& r : runs)
            for (const auto& s : r) by_step[s.evals].push_back(&s);
        for (const auto& [evals, snaps] : by_step) {
            auto emit = [&](const char* name, auto field) {
                std::vector<double> v;
                for (const Snapshot* s : snaps) v.push_back(field(*s));
                double mean = 0.0;
                for (double x : v) mean += x;
                mean /= static_cast<double>(v.size());
                csv << evals << ',' << name << ',' << mean << ',' << percentile(v, 0.05) << ','
                    << percentile(v, 0.95) << ',' << v.size() << '\n';
            };
            emit("coverage", [](const Snapshot& s) { return s.coverage; });
            emit("qd_score1", [](const Snapshot& s) { return s.qd_score1; });
            emit("qd_score_mod", [](const Snapshot& s) { return s.qd_score_mod; });
        }
        out << "wrote trajectory summary of " << runs.size() << " runs to " << out_path << '\n';
    }
    if (!archives.empty()) {
        if (profiles_path.empty()) throw CLI::ValidationError("report", "--profiles-out is required with --archive");
        std::ofstream csv(profiles_path);
        if (!csv) throw DataError("cannot write " + profiles_path);
        csv << "run,profile,threshold,count,proportion\n";
        for (std::size_t i = 0; i < archives.size(); ++i) {
            const io::ArchiveFile file = io::load_archive(archives[i]);
            const ArchiveProfiles ap = archive_profiles(file.archive, points);
            for (const auto& p : ap.ap1) csv << i << ",ap1," << p.threshold << ',' << p.count << ',' << p.proportion << '\n';
            for (const auto& p : ap.ap2) csv << i << ",ap2," << p.threshold << ',' << p.count << ',' << p.proportion << '\n';
        }
        out << "wrote archive profiles of " << archives.size() << " runs to " << profiles_path << '\n';
    }
    if (snapshots.empty() && archives.empty())
        throw CLI::ValidationError("report", "give --snapshots and/or --archive inputs");
    return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quality-diversity search for near-optimal mean-variance portfolios", "qdport"};
    app.require_subcommand(1);
    int rc = kExitOk;

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "Build an estimates JSON from returns or a preset");
    std::string est_preset, est_returns, est_universe, est_out;
    long est_window = 0;
    EstimatorFlags est_flags;
    est_cmd->add_option("--preset", est_preset, "Built-in estimates")->check(CLI::IsMember({"toy"}));
    est_cmd->add_option("--returns", est_returns, "Returns CSV");
    est_cmd->add_option("--universe", est_universe, "Asset metadata CSV");
    est_cmd->add_option("--window", est_window, "Use only the trailing T rows");
    est_cmd->add_option("--out", est_out, "Output JSON")->required();
    est_flags.add(est_cmd);
    est_cmd->callback([&] { rc = run_estimate(est_preset, est_returns, est_universe, est_flags, est_window, est_out, out); });

    // frontier
    auto* fr_cmd = app.add_subcommand("frontier", "Trace the long-only efficient frontier");
    std::string fr_est, fr_out;
    std::size_t fr_points = 100;
    fr_cmd->add_option("--estimates", fr_est)->required();
    fr_cmd->add_option("--points", fr_points)->check(CLI::Range(2, 100000));
    fr_cmd->add_option("--out", fr_out, "Frontier CSV")->required();
    fr_cmd->callback([&] { rc = run_frontier(fr_est, fr_points, fr_out, out); });

    // fit-gamma
    auto* fg_cmd = app.add_subcommand("fit-gamma", "Find the risk aversion whose optimum matches given weights");
    std::string fg_est, fg_w;
    fg_cmd->add_option("--estimates", fg_est)->required();
    fg_cmd->add_option("--weights", fg_w, "Comma-separated target weights")->required();
    fg_cmd->callback([&] { rc = run_fit_gamma(fg_est, fg_w, out); });

    // qd-run
    auto* qd_cmd = app.add_subcommand("qd-run", "Run CVT-MAP-Elites and write the archive");
    QdRunArgs qa;
    qd_cmd->add_option("--config", qa.config_path, "Key-value config file");
    qd_cmd->add_option("--estimates", qa.estimates);
    qd_cmd->add_option("--universe", qa.universe, "Asset metadata CSV (B2)");
    qd_cmd->add_option("--out", qa.out, "Archive JSONL")->required();
    qd_cmd->add_option("--partition-out", qa.partition_out);
    qd_cmd->add_option("--snapshots-out", qa.snapshots_out);
    qd_cmd->add_option("--metrics-out", qa.metrics_out);
    qd_cmd->add_option("--manifest-out", qa.manifest_out);
    qd_cmd->add_option("--seed", qa.seed);
    qd_cmd->add_option("--M", qa.niches);
    qd_cmd->add_option("--n-max", qa.n_max);
    qd_cmd->add_option("--n-cvt", qa.n_cvt);
    qd_cmd->add_option("--p-init", qa.p_init);
    qd_cmd->add_option("--m", qa.mutation, "Mutation rate");
    qd_cmd->add_option("--c", qa.c, "Near-optimality constant");
    qd_cmd->add_option("--rf", qa.rf);
    qd_cmd->add_option("--fitness", qa.fitness)->check(CLI::IsMember({"F1", "F2", "f1", "f2"}));
    qd_cmd->add_option("--behavior", qa.behavior)->check(CLI::IsMember({"B1", "B2", "b1", "b2"}));
    qd_cmd->add_option("--cvt-sampler", qa.cvt_sampler)->check(CLI::IsMember({"dirichlet", "cube"}));
    qd_cmd->add_option("--threads", qa.threads);
    qd_cmd->add_option("--batch", qa.batch, "Generation size for batched evaluation");
    auto* w0_opt = qd_cmd->add_option("--w0", qa.w0, "Fixed reference weights");
    auto* gamma_opt = qd_cmd->add_option("--gamma", qa.gamma, "Reference = MV optimum at this risk aversion");
    auto* ms_opt = qd_cmd->add_flag("--max-sharpe", qa.max_sharpe, "Reference = tangency portfolio");
    w0_opt->excludes(gamma_opt)->excludes(ms_opt);
    gamma_opt->excludes(ms_opt);
    qd_cmd->add_flag("--quiet", qa.quiet);
    qd_cmd->callback([&] { rc = run_qd_cmd(qa, out); });

    // metrics
    auto* me_cmd = app.add_subcommand("metrics", "Compute archive metrics");
    std::string me_archive, me_est, me_out, me_csv;
    std::optional<double> me_rf;
    std::size_t me_points = 100;
    me_cmd->add_option("--archive", me_archive)->required();
    me_cmd->add_option("--estimates", me_est)->required();
    me_cmd->add_option("--rf", me_rf);
    me_cmd->add_option("--points", me_points, "Archive-profile thresholds");
    me_cmd->add_option("--out", me_out, "Metrics JSON");
    me_cmd->add_option("--csv", me_csv, "Tidy metrics CSV");
    me_cmd->callback([&] { rc = run_metrics(me_archive, me_est, me_rf, me_points, me_out, me_csv, out); });

    // sweep
    auto* sw_cmd = app.add_subcommand("sweep", "Re-estimate over windows and thresholds, report coverage");
    std::string sw_archive, sw_returns, sw_universe, sw_out;
    std::string sw_t = "424,624,824,924", sw_c = "0.005,0.01,0.025,0.05,0.1";
    EstimatorFlags sw_flags;
    sw_cmd->add_option("--archive", sw_archive)->required();
    sw_cmd->add_option("--returns", sw_returns)->required();
    sw_cmd->add_option("--universe", sw_universe);
    sw_cmd->add_option("--t-grid", sw_t);
    sw_cmd->add_option("--c-grid", sw_c);
    sw_cmd->add_option("--out", sw_out, "Sweep CSV")->required();
    sw_flags.add(sw_cmd);
    sw_cmd->callback([&] { rc = run_sweep(sw_archive, sw_returns, sw_universe, sw_flags, sw_t, sw_c, sw_out, out); });

    // select
    auto* se_cmd = app.add_subcommand("select", "Pick a portfolio for a preferred behavior descriptor");
    std::string se_archive, se_bd;
    se_cmd->add_option("--archive", se_archive)->required();
    se_cmd->add_option("--bd", se_bd, "Comma-separated descriptor")->required();
    se_cmd->callback([&] { rc = run_select(se_archive, se_bd, out); });

    // synth
    auto* sy_cmd = app.add_subcommand("synth", "Generate a synthetic sector-factor universe");
    SynthParams sp;
    std::string sy_returns = "returns.csv", sy_universe = "universe.csv", sy_market;
    sy_cmd->add_option("--assets", sp.assets);
    sy_cmd->add_option("--sectors", sp.sectors);
    sy_cmd->add_option("--days", sp.days);
    sy_cmd->add_option("--seed", sp.seed);
    sy_cmd->add_option("--returns-out", sy_returns);
    sy_cmd->add_option("--universe-out", sy_universe);
    sy_cmd->add_option("--market-out", sy_market);
    sy_cmd->callback([&] { rc = run_synth(sp, sy_returns, sy_universe, sy_market, out); });

    // report
    auto* re_cmd = app.add_subcommand("report", "Summarize trajectories and archive profiles as CSV");
    std::vector<std::string> re_snaps, re_archives;
    std::string re_out = "trajectory.csv", re_profiles;
    std::size_t re_points = 100;
    re_cmd->add_option("--snapshots", re_snaps, "Snapshot CSVs from qd-run");
    re_cmd->add_option("--archive", re_archives, "Archives for profile curves");
    re_cmd->add_option("--points", re_points);
    re_cmd->add_option("--out", re_out);
    re_cmd->add_option("--profiles-out", re_profiles);
    re_cmd->callback([&] { rc = run_report(re_snaps, re_archives, re_points, re_out, re_profiles, out); });

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return rc;
}

}  // namespace qdport
