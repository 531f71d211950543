// wifitrack: synthetic data, AP localization, reconstruction and coverage
// experiments from the command line. Diagnostics go to stderr; results go to
// files.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wifitrack/apdb_io.hpp"
#include "wifitrack/config.hpp"
#include "wifitrack/coverage.hpp"
#include "wifitrack/csv.hpp"
#include "wifitrack/evaluation.hpp"
#include "wifitrack/exec.hpp"
#include "wifitrack/experiment_io.hpp"
#include "wifitrack/experiments.hpp"
#include "wifitrack/pairing.hpp"
#include "wifitrack/reconstructor.hpp"
#include "wifitrack/synth_io.hpp"
#include "wifitrack/synthgen.hpp"
#include "wifitrack/trace_io.hpp"

namespace fs = std::filesystem;
using namespace wifitrack;

namespace {

struct Global {
    std::string config;
    int threads = 0;
    std::optional<std::uint64_t> seed;
};

struct Settings {
    PairingConfig pairing;
    LocatorConfig locator;
    WorldSpec world;
};

Settings load_settings(const Global& g) {
    Settings s;
    if (!g.config.empty())
        apply_config(ConfigFile::load(g.config), {&s.pairing, &s.locator, &s.world});
    if (g.seed) s.world.seed = *g.seed;
    return s;
}

template <typename T>
void override(T& target, const std::optional<T>& flag) {
    if (flag) target = *flag;
}

void report_ingest(const IngestReport& r) {
    std::cerr << "gps: " << r.gps.records << " records, " << r.gps.malformed << " malformed\n"
              << "wifi: " << r.wifi.records << " records, " << r.wifi.malformed << " malformed\n";
    for (const auto& m : r.gps.samples) std::cerr << "  gps: " << m << '\n';
    for (const auto& m : r.wifi.samples) std::cerr << "  wifi: " << m << '\n';
}

IngestResult ingest(const std::string& dataset, const std::string& gps, const std::string& wifi) {
    const fs::path g = gps.empty() ? fs::path(dataset) / "gps.jsonl" : fs::path(gps);
    const fs::path w = wifi.empty() ? fs::path(dataset) / "wifi.jsonl" : fs::path(wifi);
    auto r = ingest_traces(g, w);
    report_ingest(r.report);
    return r;
}

void print_census(const ApDatabase& db) {
    const auto c = db.census();
    std::cerr << c.total << " unique routers: " << c.located_static + c.relocated << " located ("
              << c.located_static << " static, " << c.relocated << " relocated), " << c.mobile
              << " mobile, " << c.insufficient << " insufficient\n";
}

struct TraceArgs {
    std::string dataset, gps, wifi;
    void add(CLI::App* app) {
        app->add_option("--dataset", dataset, "Directory holding gps.jsonl and wifi.jsonl");
        app->add_option("--gps", gps, "GPS fixes (JSONL)");
        app->add_option("--wifi", wifi, "WiFi scans (JSONL)");
    }
    void check() const {
        if (dataset.empty() && (gps.empty() || wifi.empty()))
            throw CLI::ValidationError("--dataset or both --gps and --wifi are required");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WiFi access point localization and mobility coverage"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--config", g.config, "key=value settings file")->check(CLI::ExistingFile);
    app.add_option("--threads", g.threads, "Worker threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", g.seed, "Random seed");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
    std::string synth_out;
    std::optional<int> users, days, change_day, relocated;
    std::optional<double> colocated, wifi_period, gps_period, mobile_fraction, gps_noise;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--users", users, "Number of users")->check(CLI::Range(1, 100000));
    synth->add_option("--days", days, "Number of days")->check(CLI::Range(1, 100000));
    synth->add_option("--routine-change-day", change_day, "Day users adopt another routine");
    synth->add_option("--colocated", colocated, "Fraction of users sharing a campus")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--wifi-period", wifi_period, "WiFi scan period, seconds")
        ->check(CLI::PositiveNumber);
    synth->add_option("--gps-period", gps_period, "GPS period, seconds")->check(CLI::PositiveNumber);
    synth->add_option("--gps-noise", gps_noise, "GPS noise sigma, meters")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--mobile-fraction", mobile_fraction, "Mobile APs per static AP")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--relocated", relocated, "Number of relocated APs")
        ->check(CLI::NonNegativeNumber);

    // locate
    auto* locate = app.add_subcommand("locate", "Pair traces and build the AP database");
    TraceArgs locate_in;
    locate_in.add(locate);
    std::string locate_out, pairs_out;
    locate->add_option("--out", locate_out, "apdb.csv to write")->required();
    locate->add_option("--pairs", pairs_out, "Optional paired-observation dump");

    // reconstruct
    auto* recon = app.add_subcommand("reconstruct", "Estimate per-bin positions from scans");
    TraceArgs recon_in;
    recon_in.add(recon);
    std::string recon_db, recon_out;
    std::int64_t bin_ms = kTenMinutesMs;
    recon->add_option("--apdb", recon_db, "AP database")->required()->check(CLI::ExistingFile);
    recon->add_option("--out", recon_out, "timeline.csv to write")->required();
    recon->add_option("--bin-ms", bin_ms, "Bin width, ms")->check(CLI::PositiveNumber);

    // coverage
    auto* cov = app.add_subcommand("coverage", "Time coverage of a given AP database");
    TraceArgs cov_in;
    cov_in.add(cov);
    std::string cov_db, cov_out, cov_users;
    cov->add_option("--apdb", cov_db, "AP database")->required()->check(CLI::ExistingFile);
    cov->add_option("--out", cov_out, "coverage.csv to write")->required();
    cov->add_option("--users-out", cov_users, "Per-user coverage_users.csv");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Sampling strategy x sharing scenario grid");
    TraceArgs exp_in;
    exp_in.add(exp);
    std::string exp_dir;
    std::string strategy = "all";
    std::vector<std::int64_t> initial_days{7};
    std::vector<double> fractions;
    std::vector<double> daily_rates{1.0};
    std::vector<std::size_t> ks{20};
    std::vector<std::int64_t> hist_days{7, 80, 190};
    bool plots = false;
    exp->add_option("--out-dir", exp_dir, "Output directory")->required();
    exp->add_option("--strategy", strategy, "initial, random, top or all")
        ->check(CLI::IsMember({"initial", "random", "top", "all"}));
    exp->add_option("--initial-days", initial_days, "InitialPeriod lengths, days");
    exp->add_option("--fraction", fractions, "RandomFraction values (override --daily-rate)")
        ->check(CLI::Range(0.0, 1.0));
    exp->add_option("--daily-rate", daily_rates, "RandomFraction as paired fixes per user per day")
        ->check(CLI::NonNegativeNumber);
    exp->add_option("--k", ks, "TopRouters sizes")->check(CLI::PositiveNumber);
    exp->add_option("--hist-days", hist_days, "Days to histogram");
    exp->add_flag("--plots", plots, "Also write SVG plots");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Compare outputs with synthetic ground truth");
    std::string eval_dataset, eval_db, eval_tl, eval_out;
    eval->add_option("--dataset", eval_dataset, "Synthetic dataset directory")->required();
    eval->add_option("--apdb", eval_db, "AP database")->required()->check(CLI::ExistingFile);
    eval->add_option("--timeline", eval_tl, "timeline.csv")->check(CLI::ExistingFile);
    eval->add_option("--out", eval_out, "metrics.csv to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_thread_count(g.threads);
        Settings s = load_settings(g);

        if (synth->parsed()) {
            override(s.world.n_users, users);
            override(s.world.n_days, days);
            if (change_day) s.world.routine_change_day = *change_day;
            override(s.world.colocated_fraction, colocated);
            override(s.world.wifi_scan_period_s, wifi_period);
            override(s.world.gps_period_s, gps_period);
            override(s.world.gps_noise_m, gps_noise);
            override(s.world.mobile_ap_fraction, mobile_fraction);
            override(s.world.n_relocated_aps, relocated);
            const auto gt = generate_world(s.world);
            const auto sensed = simulate_sensors(gt);
            write_dataset(gt, sensed.traces, synth_out);
            const auto& st = sensed.stats;
            std::size_t mobile = 0;
            for (std::size_t i = 0; i < gt.aps.size(); ++i) mobile += gt.is_mobile(i) ? 1 : 0;
            std::cerr << "users " << gt.users.size() << ", days " << s.world.n_days << ", buildings "
                      << gt.buildings.size() << ", APs " << gt.aps.size() << " (" << mobile
                      << " mobile)\n"
                      << "scans " << st.scans << " (" << format_fixed(100.0 * st.nonempty_fraction(), 1)
                      << "% non-empty), sightings " << st.sightings << ", fixes " << st.fixes << '\n'
                      << "density r2 "
                      << (st.density_r2 ? format_fixed(*st.density_r2, 3) : std::string("n/a")) << '\n';
        } else if (locate->parsed()) {
            locate_in.check();
            const auto in = ingest(locate_in.dataset, locate_in.gps, locate_in.wifi);
            const auto obs = pair_observations(in.traces, s.pairing);
            if (!pairs_out.empty()) write_pairs_csv(obs, pairs_out);
            const auto db = build_database(obs, s.locator);
            write_apdb_csv(db, locate_out);
            std::cerr << obs.size() << " paired observations\n";
            print_census(db);
            const auto named = validate_against_named_ssids(db, in.traces.scans(), default_mobile_ssids());
            std::cerr << "named hotspot/transit SSIDs: " << named.candidates << " BSSIDs, "
                      << named.mobile << " mobile, " << named.located << " located, "
                      << named.insufficient << " insufficient\n";
        } else if (recon->parsed()) {
            recon_in.check();
            const auto in = ingest(recon_in.dataset, recon_in.gps, recon_in.wifi);
            const auto db = read_apdb_csv(recon_db);
            const auto tls = build_timelines(in.traces, db, bin_ms);
            write_timeline_csv(tls, recon_out);
            std::size_t bins = 0, est = 0;
            for (const auto& t : tls) {
                bins += t.bins.size();
                est += t.estimated_bins();
            }
            std::cerr << est << " of " << bins << " bins with WiFi data estimated\n";
        } else if (cov->parsed()) {
            cov_in.check();
            const auto in = ingest(cov_in.dataset, cov_in.gps, cov_in.wifi);
            const auto db = read_apdb_csv(cov_db);
            const Timestamp start = in.traces.earliest().value_or(Timestamp(0));
            std::vector<UserDayCoverage> rows;
            for (const auto& r : in.traces.scan_ranges()) {
                auto part = user_coverage(in.traces.scans_of(r.user), db, start);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            const auto series = CoverageSeries::from(rows);
            CsvWriter w(cov_out, {"day_index", "scenario", "strategy", "param", "mean_coverage", "n_users"});
            for (const auto& [day, mean] : series.daily_mean)
                w.row({std::to_string(day), "given", "apdb", fs::path(cov_db).filename().string(),
                       format_double(mean), std::to_string(series.daily_users.at(day))});
            w.close();
            if (!cov_users.empty()) write_user_coverage_csv(rows, cov_users);
            double sum = 0.0;
            for (const auto& [k, f] : series.per_user_day) sum += f;
            if (!series.per_user_day.empty())
                std::cerr << "mean coverage "
                          << format_fixed(sum / static_cast<double>(series.per_user_day.size()), 4)
                          << " over " << series.per_user_day.size() << " user-days\n";
        } else if (exp->parsed()) {
            exp_in.check();
            const auto in = ingest(exp_in.dataset, exp_in.gps, exp_in.wifi);
            const ExperimentContext ctx(in.traces, s.locator, s.pairing);
            std::cerr << ctx.paired_events() << " paired fixes over " << ctx.span_days() << " days\n";
            std::vector<SamplingStrategy> grid;
            const bool all = strategy == "all";
            if (all || strategy == "initial")
                for (auto d : initial_days) grid.push_back(InitialPeriod{d});
            if (all || strategy == "random") {
                const std::uint64_t seed = g.seed.value_or(0);
                if (!fractions.empty())
                    for (double f : fractions) grid.push_back(RandomFraction{f, seed});
                else
                    for (double r : daily_rates)
                        grid.push_back(RandomFraction{ctx.fraction_for_daily_rate(r), seed});
            }
            if (all || strategy == "top")
                for (auto k : ks) grid.push_back(TopRouters{k});
            ExperimentOptions opts;
            opts.histogram_days = hist_days;
            const auto results = run_grid(ctx, grid, opts);
            fs::create_directories(exp_dir);
            write_grid_csv(results, fs::path(exp_dir) / "experiment_grid.csv");
            write_coverage_csv(results, fs::path(exp_dir) / "coverage.csv");
            write_histograms_csv(results, fs::path(exp_dir) / "histograms.csv");
            if (plots) write_grid_plots(results, fs::path(exp_dir) / "plots");
            for (const auto& r : results) {
                const auto m = r.mean_coverage();
                std::cerr << strategy_name(r.strategy) << ' ' << strategy_param(r.strategy) << ' '
                          << scenario_name(r.scenario) << ": mean coverage "
                          << (m ? format_fixed(*m, 4) : std::string("n/a")) << '\n';
            }
        } else if (eval->parsed()) {
            const fs::path dir(eval_dataset);
            const auto truth = read_truth_aps_csv(dir / "truth_aps.csv");
            const auto db = read_apdb_csv(eval_db);
            const auto ap = evaluate_database(db, truth, s.locator.min_sightings);
            std::vector<std::pair<std::string, std::string>> metrics;
            const auto put = [&](const std::string& k, std::optional<double> v) {
                metrics.emplace_back(k, v ? format_double(*v) : "");
            };
            put("static_eligible", static_cast<double>(ap.static_eligible));
            put("static_located_fraction", ap.static_located_fraction());
            put("static_error_p50_m", percentile(ap.static_errors_m, 0.5));
            put("static_error_p90_m", percentile(ap.static_errors_m, 0.9));
            put("static_error_p95_m", percentile(ap.static_errors_m, 0.95));
            put("static_mobile_rate", ap.static_mobile_rate());
            put("mobile_recall", ap.mobile_recall());
            for (const auto& [t, row] : ap.confusion)
                for (const auto& [p, n] : row) put("confusion_" + t + "_as_" + p, static_cast<double>(n));
            if (!eval_tl.empty()) {
                const auto tracks = read_truth_positions_csv(dir / "truth_positions.csv");
                const auto rows = read_timeline_csv(eval_tl);
                const auto bins = evaluate_bins(rows, tracks);
                put("bins_with_data", static_cast<double>(bins.bins_with_data));
                put("bins_estimated", static_cast<double>(bins.bins_estimated));
                put("bin_error_p50_m", percentile(bins.errors_m, 0.5));
                put("bin_error_p90_m", percentile(bins.errors_m, 0.9));
                put("bin_error_p95_m", percentile(bins.errors_m, 0.95));
                put("bins_within_150m", bins.fraction_within(150.0));
            }
            for (const auto& [k, v] : metrics) std::cerr << k << ' ' << (v.empty() ? "n/a" : v) << '\n';
            if (!eval_out.empty()) {
                CsvWriter w(eval_out, {"metric", "value"});
                for (const auto& [k, v] : metrics) w.row({k, v});
                w.close();
            }
        }
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
