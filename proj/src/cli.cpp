// SPDX-License-Identifier: Apache-2.0

#include "pace/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "pace/decoder.hpp"
#include "pace/estimator.hpp"
#include "pace/fading.hpp"
#include "pace/frame.hpp"
#include "pace/gmi.hpp"
#include "pace/kernels.hpp"
#include "pace/mc.hpp"
#include "pace/spectrum.hpp"

namespace pace::cli {

namespace {

using nlohmann::json;

constexpr double kLn2 = 0.69314718055994530942;

// Fixed shortest-roundtrip formatting keeps outputs byte-identical for
// identical configs.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Options {
    std::string psd_kind = "rect"; // rect | rc | csv
    double rolloff = 0.25;
    std::string psd_csv;
    double bandwidth = 0.1;
    int n_tx = 1, n_rx = 1;
    int period = 5;
    int window = 10;
    int n_data = 0; // 0: smallest valid (one data block)
    std::vector<double> snr_db{10.0};
    long trials = 10000;
    std::uint64_t seed = 1;
    int threads = 0; // 0: hardware concurrency
    bool bits = false;
    std::string out_csv, out_json;
    std::string kernels = "auto";
    std::string dump_schedule;
    // subcommand extras
    std::vector<int> window_list{1, 2, 5, 10, 20};
    int theta_points = 25;
    double theta_decades = 2.0;
    bool no_asymptotic = false;
    int messages = 4;

    double rate_scale() const { return bits ? 1.0 / kLn2 : 1.0; }
    const char* rate_unit() const { return bits ? "bits" : "nats"; }

    Spectrum make_psd() const {
        if (psd_kind == "rect") return Spectrum::rectangular(bandwidth);
        if (psd_kind == "rc") return Spectrum::raised_cosine(bandwidth, rolloff);
        if (psd_kind == "csv") return Spectrum::load_csv(psd_csv);
        throw CLI::ValidationError("--psd must be rect, rc or csv");
    }

    int resolved_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }

    int resolved_n_data() const { return n_data > 0 ? n_data : period - n_tx; }

    FrameSchedule make_schedule() const {
        return FrameSchedule(period, n_tx, window, resolved_n_data());
    }

    json config_json(const std::string& subcommand) const {
        json j;
        j["subcommand"] = subcommand;
        j["psd"] = psd_kind;
        if (psd_kind == "rc") j["rolloff"] = rolloff;
        if (psd_kind == "csv") j["psd_csv"] = psd_csv;
        j["bandwidth"] = bandwidth;
        j["n_tx"] = n_tx;
        j["n_rx"] = n_rx;
        j["period"] = period;
        j["window"] = window;
        j["n_data"] = resolved_n_data();
        j["snr_db"] = snr_db;
        j["trials"] = trials;
        j["seed"] = seed;
        j["threads"] = resolved_threads();
        j["units"] = rate_unit();
        j["kernels"] = kern::active_name();
        return j;
    }
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--psd", o.psd_kind, "spectral density shape: rect|rc|csv")
        ->check(CLI::IsMember({"rect", "rc", "csv"}))
        ->capture_default_str();
    cmd->add_option("--rolloff", o.rolloff, "raised-cosine rolloff in [0,1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--psd-csv", o.psd_csv, "two-column CSV (lambda, density) for --psd csv");
    cmd->add_option("--bandwidth", o.bandwidth, "fading bandwidth lambda_D in (0, 1/2)")
        ->capture_default_str();
    cmd->add_option("--ntx", o.n_tx, "transmit antennas")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--nrx", o.n_rx, "receive antennas")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("-L,--period", o.period, "pilot period L (pilots every L instants)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("-T,--window", o.window, "estimator half-window in pilot periods")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("-N,--ndata", o.n_data,
                    "data vectors per frame, multiple of L - ntx (0 = one block)")
        ->capture_default_str();
    cmd->add_option("--snr-db", o.snr_db, "SNR grid in dB")->expected(-1)->capture_default_str();
    cmd->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "master RNG seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    cmd->add_flag("--bits", o.bits, "report rates in bits instead of nats");
    cmd->add_option("--out-csv", o.out_csv, "write result rows as CSV");
    cmd->add_option("--out-json", o.out_json, "write full report as JSON");
    cmd->add_option("--kernels", o.kernels, "arithmetic backend: auto|scalar|avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
        ->capture_default_str();
    cmd->add_option("--dump-schedule", o.dump_schedule,
                    "write the pilot/data/silent index sets as JSON");
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << text;
}

void prepare(const Options& o) {
    if (!kern::select(o.kernels))
        throw CLI::ValidationError("--kernels " + o.kernels + " is unavailable on this CPU");
    const int l_star = static_cast<int>(std::floor(1.0 / (2.0 * o.bandwidth) + 1e-9));
    if (o.psd_kind != "csv" && o.period > l_star)
        std::cerr << "warning: L=" << o.period << " exceeds 1/(2 lambda_D)=" << l_star
                  << "; pilot sampling is aliased and pre-log claims do not apply\n";
    if (!o.dump_schedule.empty())
        write_file(o.dump_schedule, o.make_schedule().to_json() + "\n");
}

// ---------------------------------------------------------------- variance

int cmd_variance(const Options& o) {
    prepare(o);
    const Spectrum psd = o.make_psd();
    const double snr = std::pow(10.0, o.snr_db.front() / 10.0);
    const int nt = o.n_tx, nr = o.n_rx;
    const AsymptoticErrorProfile prof(psd, o.period, snr, nt);

    std::string csv = "offset,tx,window,sigma2_T,sigma2_inf,mc_variance,mc_se\n";
    json rows = json::array();
    for (int T : o.window_list) {
        InterpolatorBank bank(psd, o.period, nt, T, snr);
        PeriodSampler sampler(psd, bank, nr);
        const int n_off = static_cast<int>(bank.offsets().size());
        auto est = mc::run(o.trials, derive_seed(o.seed, 0x76u, T), o.resolved_threads(),
                           n_off * nt, [&](Rng& rng, double* out) {
                               thread_local PeriodSampler::Draw d;
                               sampler.draw(rng, d);
                               for (int oi = 0; oi < n_off; ++oi)
                                   for (int t = 0; t < nt; ++t) {
                                       double acc = 0.0;
                                       for (int r = 0; r < nr; ++r)
                                           acc += std::norm(d.h[(oi * nr + r) * nt + t] -
                                                            d.h_hat[(oi * nr + r) * nt + t]);
                                       out[oi * nt + t] = acc / nr;
                                   }
                           });
        for (int oi = 0; oi < n_off; ++oi) {
            const int off = bank.offsets()[oi];
            const double s_inf = prof.sigma2[oi];
            for (int t = 0; t < nt; ++t) {
                const double s_t = bank.error_variance(off, t);
                csv += std::to_string(off) + "," + std::to_string(t) + "," + std::to_string(T) +
                       "," + fmt(s_t) + "," + fmt(s_inf) + "," + fmt(est.mean[oi * nt + t]) +
                       "," + fmt(est.se[oi * nt + t]) + "\n";
                rows.push_back({{"offset", off},
                                {"tx", t},
                                {"window", T},
                                {"sigma2_T", s_t},
                                {"sigma2_inf", s_inf},
                                {"mc_variance", est.mean[oi * nt + t]},
                                {"mc_se", est.se[oi * nt + t]}});
            }
        }
    }
    std::fputs(csv.c_str(), stdout);
    if (!o.out_csv.empty()) write_file(o.out_csv, csv);
    if (!o.out_json.empty()) {
        json j;
        j["config"] = o.config_json("variance");
        j["sigma2_star_inf"] = prof.sigma2_star;
        j["rows"] = rows;
        write_file(o.out_json, j.dump(2) + "\n");
    }
    return 0;
}

// --------------------------------------------------------------------- gmi

int cmd_gmi(const Options& o) {
    prepare(o);
    const Spectrum psd = o.make_psd();
    // The achievability analysis reduces to the square system: with nt > nr
    // only nr transmit antennas are used, with nr > nt the extra receive
    // antennas are ignored.
    const int n = std::min(o.n_tx, o.n_rx);
    if (n != o.n_tx || n != o.n_rx)
        std::cerr << "note: reducing to " << n << "x" << n << " for the GMI computation\n";
    if (o.period <= n) throw CLI::ValidationError("gmi: need min(ntx,nrx) < L");
    const int l_star = static_cast<int>(std::floor(1.0 / (2.0 * o.bandwidth) + 1e-9));
    const double scale = o.rate_scale();

    GmiReport rep;
    rep.n_tx = o.n_tx;
    rep.n_rx = o.n_rx;
    rep.period = o.period;
    rep.window = o.window;
    rep.bandwidth = o.bandwidth;
    rep.trials = o.trials;
    rep.seed = o.seed;
    rep.l_star = l_star;
    rep.prelog_miso_ref = prelog_miso(o.bandwidth);
    rep.prelog_mimo_ref = prelog_mimo_lower_bound(o.n_tx, o.n_rx, o.bandwidth);
    rep.prelog_scheme = prelog_achievable(o.n_tx, o.n_rx, o.bandwidth).bound;

    const int threads = o.resolved_threads();
    for (std::size_t si = 0; si < o.snr_db.size(); ++si) {
        GmiPoint p;
        p.snr_db = o.snr_db[si];
        p.snr = std::pow(10.0, p.snr_db / 10.0);
        InterpolatorBank bank(psd, o.period, n, o.window, p.snr);
        p.sigma2_star_T = bank.sigma2_star();
        p.theta = -1.0 / (n + (p.snr / n) * n * n * p.sigma2_star_T);
        p.b_constant = gmi_b_constant(p.snr, bank, n);
        const auto kap = kappa_mc(p.theta, p.snr, psd, bank, n, o.trials,
                                  derive_seed(o.seed, 0x6bu, si), threads);
        p.kappa = kap.kappa;
        p.kappa_se = kap.se;
        p.fixed_theta_bound = p.theta * p.b_constant - p.kappa;
        if (o.theta_points > 0) {
            const auto sw = gmi_theta_sweep(p.snr, psd, bank, n, o.trials,
                                            derive_seed(o.seed, 0x73u, si), threads,
                                            o.theta_points, o.theta_decades);
            p.has_sweep = true;
            p.sweep_theta = sw.best_theta;
            p.sweep_bound = sw.best_bound;
        }
        const auto ft = gmi_lower_bound_finite_T(p.snr, psd, bank, n, o.trials,
                                                 derive_seed(o.seed, 0x66u, si), threads);
        p.finite_t_bound = ft.value;
        p.finite_t_se = ft.se;
        if (!o.no_asymptotic && o.period <= l_star) {
            const auto ab = gmi_lower_bound_asymptotic(p.snr, o.period, n, n, psd, o.trials,
                                                       derive_seed(o.seed, 0x61u, si), threads);
            p.has_asymptotic = true;
            p.asym_mc = ab.logdet_form.value;
            p.asym_mc_se = ab.logdet_form.se;
            p.asym_closed = ab.closed_form;
            p.sigma2_star = ab.sigma2_star;
        }
        rep.points.push_back(p);
    }

    // Pre-log fit on the asymptotic MC bound when the grid supports it.
    std::vector<double> xs, ys;
    for (const auto& p : rep.points)
        if (p.has_asymptotic) {
            xs.push_back(p.snr);
            ys.push_back(p.asym_mc);
        }
    if (xs.size() >= 3) {
        double lo = xs[0], hi = xs[0];
        for (double v : xs) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi / lo >= 99.999) {
            rep.fit = fit_prelog(xs, ys);
            rep.has_fit = true;
        }
    }

    std::string csv =
        "snr_db,snr,theta,b_constant,kappa,kappa_se,fixed_theta_bound,sweep_theta,sweep_bound,"
        "finite_t_bound,finite_t_se,finite_t_clamped,asym_mc,asym_mc_se,asym_closed,"
        "asym_clamped,sigma2_star_T,sigma2_star\n";
    for (const auto& p : rep.points) {
        csv += fmt(p.snr_db) + "," + fmt(p.snr) + "," + fmt(p.theta) + "," + fmt(p.b_constant) +
               "," + fmt(scale * p.kappa) + "," + fmt(scale * p.kappa_se) + "," +
               fmt(scale * p.fixed_theta_bound) + "," + fmt(p.sweep_theta) + "," +
               fmt(scale * p.sweep_bound) + "," + fmt(scale * p.finite_t_bound) + "," +
               fmt(scale * p.finite_t_se) + "," + fmt(std::max(0.0, scale * p.finite_t_bound)) +
               "," + fmt(scale * p.asym_mc) + "," + fmt(scale * p.asym_mc_se) + "," +
               fmt(scale * p.asym_closed) + "," + fmt(std::max(0.0, scale * p.asym_mc)) + "," +
               fmt(p.sigma2_star_T) + "," + fmt(p.sigma2_star) + "\n";
    }
    std::fputs(csv.c_str(), stdout);
    if (rep.has_fit)
        std::cout << "# fitted pre-log slope: " << fmt(scale * rep.fit.slope)
                  << "  (closed-form reference: " << fmt(scale * rep.prelog_scheme) << ")\n";
    if (!o.out_csv.empty()) write_file(o.out_csv, csv);
    if (!o.out_json.empty()) {
        json j;
        j["config"] = o.config_json("gmi");
        j["l_star"] = rep.l_star;
        j["prelog_refs"] = {{"miso", scale * rep.prelog_miso_ref},
                            {"mimo_lower_bound", scale * rep.prelog_mimo_ref},
                            {"achievable", scale * rep.prelog_scheme}};
        if (rep.has_fit)
            j["fit"] = {{"slope", scale * rep.fit.slope},
                        {"intercept", scale * rep.fit.intercept}};
        json pts = json::array();
        for (const auto& p : rep.points) {
            json q = {{"snr_db", p.snr_db},
                      {"snr", p.snr},
                      {"theta", p.theta},
                      {"b_constant", p.b_constant},
                      {"kappa", scale * p.kappa},
                      {"kappa_se", scale * p.kappa_se},
                      {"fixed_theta_bound", scale * p.fixed_theta_bound},
                      {"finite_t_bound", scale * p.finite_t_bound},
                      {"finite_t_se", scale * p.finite_t_se},
                      {"finite_t_clamped", std::max(0.0, scale * p.finite_t_bound)},
                      {"sigma2_star_T", p.sigma2_star_T}};
            if (p.has_sweep) {
                q["sweep_theta"] = p.sweep_theta;
                q["sweep_bound"] = scale * p.sweep_bound;
            }
            if (p.has_asymptotic) {
                q["asym_mc"] = scale * p.asym_mc;
                q["asym_mc_se"] = scale * p.asym_mc_se;
                q["asym_closed"] = scale * p.asym_closed;
                q["asym_clamped"] = std::max(0.0, scale * p.asym_mc);
                q["sigma2_star"] = p.sigma2_star;
            }
            pts.push_back(q);
        }
        j["points"] = pts;
        write_file(o.out_json, j.dump(2) + "\n");
    }
    return 0;
}

// ------------------------------------------------------------------ prelog

int cmd_prelog(const Options& o) {
    prepare(o);
    const auto th = prelog_achievable(o.n_tx, o.n_rx, o.bandwidth);
    const double scale = o.rate_scale();
    std::printf("L* (largest integer <= 1/(2 lambda_D)) : %d\n", th.l_star);
    std::printf("achievable pre-log, %dx%d              : %s\n", o.n_tx, o.n_rx,
                fmt(scale * th.bound).c_str());
    std::printf("MISO capacity pre-log 1-2*lambda_D    : %s\n",
                fmt(scale * prelog_miso(o.bandwidth)).c_str());
    std::printf("MIMO capacity pre-log lower bound     : %s\n",
                fmt(scale * prelog_mimo_lower_bound(o.n_tx, o.n_rx, o.bandwidth)).c_str());
    std::printf("optimizing min(ntx,nrx) = L*/2        : %s\n", fmt(th.best_antennas).c_str());
    std::printf("maximum pre-log L*/4                  : %s\n",
                fmt(scale * th.best_bound).c_str());
    if (!o.out_json.empty()) {
        json j;
        j["config"] = o.config_json("prelog");
        j["l_star"] = th.l_star;
        j["achievable"] = scale * th.bound;
        j["miso"] = scale * prelog_miso(o.bandwidth);
        j["mimo_lower_bound"] = scale * prelog_mimo_lower_bound(o.n_tx, o.n_rx, o.bandwidth);
        j["best_antennas"] = th.best_antennas;
        j["best_bound"] = scale * th.best_bound;
        write_file(o.out_json, j.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Options& o) {
    prepare(o);
    const Spectrum psd = o.make_psd();
    const FrameSchedule schedule = o.make_schedule();
    const ChannelParams params{o.n_tx, o.n_rx, std::pow(10.0, o.snr_db.front() / 10.0)};
    const Codebook cb =
        generate_codebook(o.messages, static_cast<int>(schedule.data_indices().size()), o.n_tx,
                          derive_seed(o.seed, 0x63u));
    const LinkStats stats = simulate_link(psd, params, schedule, cb, o.trials, o.seed,
                                          o.resolved_threads());
    std::string text = stats.to_json();
    std::fputs((text + "\n").c_str(), stdout);
    if (!o.out_json.empty()) {
        json j = json::parse(text);
        j["config"] = o.config_json("simulate");
        j["config"]["messages"] = o.messages;
        write_file(o.out_json, j.dump(2) + "\n");
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"pilot-aided channel estimation and nearest-neighbour decoding toolkit"};
    app.require_subcommand(1);
    // Key=value config file; subcommand options live in a [subcommand]
    // section (or flat `subcommand.key=value` entries). Flags override.
    app.set_config("--config", "", "read options from a key=value config file");
    app.get_config_formatter_base()->comment('#');
    std::string emit_config;
    app.add_option("--emit-config", emit_config,
                   "write the fully resolved configuration back out as a config file");

    // One option block per subcommand: a config file may carry sections for
    // all of them without the sections stepping on each other.
    Options o_var, o_gmi, o_pre, o_sim;
    auto* variance = app.add_subcommand(
        "variance", "analytic and Monte Carlo interpolation-error variances vs window T");
    add_common(variance, o_var);
    variance->add_option("--window-list", o_var.window_list, "estimator windows T to evaluate")
        ->expected(-1)
        ->capture_default_str();

    auto* gmi = app.add_subcommand("gmi", "GMI lower bounds over an SNR grid with pre-log fit");
    add_common(gmi, o_gmi);
    gmi->add_option("--theta-points", o_gmi.theta_points,
                    "theta sweep grid size (0 disables the sweep)")
        ->capture_default_str();
    gmi->add_option("--theta-decades", o_gmi.theta_decades, "sweep half-width in decades")
        ->capture_default_str();
    gmi->add_flag("--no-asymptotic", o_gmi.no_asymptotic, "skip the T->infinity bound");

    auto* prelog = app.add_subcommand("prelog", "closed-form pre-log reference values");
    add_common(prelog, o_pre);

    auto* simulate =
        app.add_subcommand("simulate", "end-to-end frame-error simulation of the NN decoder");
    add_common(simulate, o_sim);
    simulate->add_option("-M,--messages", o_sim.messages, "codebook size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (!emit_config.empty()) write_file(emit_config, app.config_to_str(true, false));
        if (variance->parsed()) return cmd_variance(o_var);
        if (gmi->parsed()) return cmd_gmi(o_gmi);
        if (prelog->parsed()) return cmd_prelog(o_pre);
        if (simulate->parsed()) return cmd_simulate(o_sim);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace pace::cli
