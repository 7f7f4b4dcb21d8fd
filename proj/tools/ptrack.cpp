#include "ptrack/audio_io.hpp"
#include "ptrack/config.hpp"
#include "ptrack/errors.hpp"
#include "ptrack/eval.hpp"
#include "ptrack/greedy.hpp"
#include "ptrack/lpsolve.hpp"
#include "ptrack/serialize.hpp"
#include "ptrack/svg_plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace ptrack;
using nlohmann::json;

enum Exit : int {
    kOk = 0,
    kInvalidInput = 2,
    kInfeasible = 3,
    kConsistency = 4,
    kEarlyStop = 5,
};

double parse_number(const std::string& flag, const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw CLI::ValidationError(flag, "not a number: '" + text + "'");
    return v;
}

/// Flags shared by every subcommand. Each one that is given on the command
/// line is written into a JSON patch applied over the config file.
struct Overrides {
    std::string config_path;
    json patch = json::object();

    template <class T>
    void add(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key,
             const std::string& help)
    {
        app->add_option_function<T>(
            flag, [this, section, key](const T& v) { patch[section][key] = v; }, help);
    }

    void add_nullable(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key,
                      const std::string& help)
    {
        app->add_option_function<std::string>(
            flag,
            [this, flag, section, key](const std::string& v) {
                if (v == "inf" || v == "none")
                    patch[section][key] = nullptr;
                else
                    patch[section][key] = parse_number(flag, v);
            },
            help + " ('inf' for none)");
    }

    RunConfig load() const
    {
        json base = config_path.empty() ? json::object() : read_json_file(config_path);
        merge_overrides(base, patch);
        return load_config(base);
    }
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("--config", o.config_path, "JSON config file; flags override its values")
        ->check(CLI::ExistingFile);
    o.add<double>(app, "--fs", "signal", "fs", "sample rate in Hz");
    o.add<double>(app, "--duration", "signal", "duration", "signal length in seconds");
    o.add<Index>(app, "--win-len", "stft", "win_len", "analysis window length");
    o.add<Index>(app, "--hop", "stft", "hop", "hop size in samples");
    o.add<Index>(app, "--fft-len", "stft", "fft_len", "FFT length");
    o.add<double>(app, "--band-width", "peaks", "band_width", "peak-picking band width in Hz");
    o.add<double>(app, "--band-spacing", "peaks", "band_spacing", "peak-picking band step in Hz");
    o.add<double>(app, "--f-min", "peaks", "f_min", "lowest frequency kept in Hz");
    o.add<double>(app, "--f-max", "peaks", "f_max", "highest frequency kept in Hz");
    o.add<double>(app, "--peak-floor", "peaks", "floor_db", "drop peaks this many dB below the frame maximum");
    o.add<Index>(app, "--num-paths", "tracking", "L", "number of paths L");
    o.add<Index>(app, "--k-mq", "tracking", "k_mq", "frames per greedy span");
    o.add_nullable(app, "--delta-lp", "tracking", "delta_lp", "LP connection threshold");
    o.add_nullable(app, "--delta-mq", "tracking", "delta_mq", "greedy connection threshold");
    o.add<std::string>(app, "--method", "tracking", "method", "greedy, lp or both");
}

int run_config(const Overrides& o, bool dump)
{
    const RunConfig cfg = o.load();
    validate(cfg, false);
    if (dump)
        std::cout << to_json(cfg).dump(2) << '\n';
    return kOk;
}

int run_synth(const Overrides& o, const std::string& out, const std::string& format)
{
    const RunConfig cfg = o.load();
    validate(cfg, false);
    const SignalConfig& sc = cfg.experiment.signal;
    if (sc.complex)
        throw InvalidInput("audio files carry one real channel; set signal.complex to false for synth");

    SignalConfig clean_cfg = sc;
    clean_cfg.snr_db = kNoNoise;
    const SignalBuffer clean = synth_mixture(clean_cfg);
    SignalBuffer out_sig = add_noise(clean, sc.snr_db, sc.seed);
    const double achieved = std::isinf(sc.snr_db) ? kNoNoise : measured_snr_db(clean, out_sig);

    if (format == "raw") {
        write_raw_f64(out, out_sig);
    } else {
        const WavFormat wf = format == "pcm16" ? WavFormat::pcm16 : WavFormat::float32;
        const double peak = out_sig.samples.cwiseAbs().maxCoeff();
        if (wf == WavFormat::pcm16 && peak > 1.0) {
            out_sig.samples /= peak;
            std::cerr << "scaled by 1/" << peak << " to fit 16-bit range\n";
        }
        write_wav(out, out_sig, wf);
    }

    if (std::isinf(sc.snr_db))
        std::cout << "achieved SNR: clean (no noise added)\n";
    else
        std::printf("achieved SNR: %.3f dB (target %.3f dB)\n", achieved, sc.snr_db);
    std::printf("wrote %ld samples at %g Hz to %s\n", long(out_sig.size()), out_sig.fs, out.c_str());
    return kOk;
}

SignalBuffer read_signal(const std::filesystem::path& in)
{
    const auto ext = in.extension().string();
    if (ext == ".wav" || ext == ".WAV")
        return read_wav(in);
    return read_raw_f64(in);
}

int run_analyze(const Overrides& o, const std::string& in, const std::string& out)
{
    RunConfig cfg = o.load();
    const SignalBuffer sig = read_signal(in);
    cfg.experiment.signal.fs = sig.fs;
    cfg.experiment.stft.fs = sig.fs;
    validate(cfg, false);
    const Lattice lat = analyze(sig, cfg.experiment.analysis());
    write_atoms(out, lat);
    std::printf("%ld frames, %ld atoms written to %s\n", long(lat.frame_count()), long(lat.node_count()), out.c_str());
    return kOk;
}

int run_track(const Overrides& o, const std::string& in, const std::string& out, const std::string& dump_dir)
{
    const RunConfig cfg = o.load();
    validate(cfg, false);
    const TrackingConfig& tc = cfg.experiment.tracking;
    const Lattice lat = read_atoms(in);
    const CostFn d = CostFn::prediction_error(double(lat.hop));

    json result = json::object();
    int code = kOk;

    if (cfg.method != Method::lp) {
        const PathSet g = chain_short_paths(lat, d, tc.paths, tc.delta_mq, tc.k_mq);
        result["greedy"] = pathset_to_json(g);
        std::printf("greedy: %ld paths, total cost %.6g%s\n", long(g.size()), g.total_cost,
                    g.early_stop ? " (stopped early at the threshold)" : "");
        if (g.early_stop)
            code = kEarlyStop;
    }

    if (cfg.method != Method::greedy) {
        try {
            if (!dump_dir.empty() && lat.node_count() > 0) {
                const PairSet ps = build_pairs(lat, d, tc.delta_lp);
                write_problem(dump_dir, build_problem(ps, lat, tc.paths));
            }
            const PathSet lp = track_lp(lat, d, tc.paths, tc.delta_lp);
            result["lp"] = pathset_to_json(lp);
            std::printf("lp: %ld paths, total cost %.6g\n", long(lp.size()), lp.total_cost);
        } catch (const InfeasibleError& e) {
            result["lp"] = nullptr;
            result["lp_error"] = {{"message", e.what()},
                                  {"frame", e.frame()},
                                  {"transition", e.transition()},
                                  {"max_paths", e.max_flow()}};
            std::cerr << "lp infeasible: " << e.what() << '\n';
            code = kInfeasible;
        }
    }

    write_text_file(out, result.dump(1) + "\n");
    return code;
}

int run_eval(const Overrides& o, const std::string& out, const std::string& svg)
{
    const RunConfig cfg = o.load();
    validate(cfg, true);
    const ExperimentResult res = run_experiment(cfg.experiment);
    write_text_file(out, experiment_to_json(res, cfg.experiment).dump(1) + "\n");
    if (!svg.empty())
        write_text_file(svg, plot_experiment_svg(res, cfg.experiment));

    for (const SnrSummary& s : res.summary) {
        std::printf("SNR %-6s", std::isinf(s.snr_db) ? "clean" : (std::to_string(int(s.snr_db)) + "dB").c_str());
        for (const auto& [name, m] : {std::pair{"lp", &s.lp}, std::pair{"greedy", &s.greedy}}) {
            std::printf("  %s coverage", name);
            for (double c : m->coverage)
                std::printf(" %.2f", c);
            std::printf(" error %.1f Hz", m->mean_error_hz);
        }
        std::printf("\n");
    }
    return kOk;
}

int run_plot(const Overrides& o, const std::string& out, const std::string& atoms, const std::string& paths,
             const std::string& which)
{
    const RunConfig cfg = o.load();
    if (atoms.empty()) {
        validate(cfg, true);
        const ExperimentResult res = run_experiment(cfg.experiment);
        write_text_file(out, plot_experiment_svg(res, cfg.experiment));
        return kOk;
    }

    const Lattice lat = read_atoms(atoms);
    std::optional<PathSet> ps;
    if (!paths.empty()) {
        const json j = read_json_file(paths);
        // Either a bare PathSet or the {"lp": ..., "greedy": ...} output of track.
        if (j.contains("paths"))
            ps = pathset_from_json(j);
        else if (j.contains(which) && !j.at(which).is_null())
            ps = pathset_from_json(j.at(which));
    }
    const PlotRange range{std::max(0.0, cfg.experiment.peaks.f_min - 50.0), cfg.experiment.peaks.f_max + 50.0};
    const std::string title = ps ? which + " paths" : "atoms";
    write_text_file(out, plot_panel_svg(lat, ps ? &*ps : nullptr, range, title));
    return kOk;
}

int run_bench(const std::string& out, Index trials, std::uint64_t seed)
{
    const std::vector<Index> n_range{2, 3, 4, 5};
    const std::vector<Index> k_range{2, 3, 4};
    const std::vector<Index> l_range{0, 1};
    const ScalingReport rep = scaling_benchmark(n_range, k_range, l_range, trials, seed);
    json rows = json::array();
    std::printf("%3s %3s %3s %12s %12s %6s %12s\n", "N", "K", "l", "candidates", "(N-l)^K", "P", "lp_seconds");
    for (const ScalingRow& r : rep.rows) {
        std::printf("%3ld %3ld %3ld %12llu %12llu %6ld %12.3e\n", long(r.nodes), long(r.frames), long(r.step),
                    (unsigned long long)r.greedy_candidates, (unsigned long long)r.expected_candidates,
                    long(r.pairs), r.lp_seconds);
        rows.push_back({{"N", r.nodes}, {"K", r.frames}, {"l", r.step}, {"greedy_candidates", r.greedy_candidates},
                        {"expected_candidates", r.expected_candidates}, {"P", r.pairs}, {"lp_seconds", r.lp_seconds}});
    }
    std::printf("counts match: %s, LP log-log slope in P: %.2f\n", rep.counts_match ? "yes" : "no",
                rep.lp_loglog_slope);
    if (!out.empty())
        write_text_file(out, json{{"rows", rows}, {"counts_match", rep.counts_match},
                                  {"lp_loglog_slope", rep.lp_loglog_slope}}.dump(1) + "\n");
    return rep.counts_match ? kOk : kConsistency;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sinusoidal partial tracking: synthesis, chirp analysis, greedy and LP tracking"};
    app.require_subcommand(1);

    Overrides ov;

    auto* cfg_cmd = app.add_subcommand("config", "print the merged configuration");
    bool dump = false;
    cfg_cmd->add_flag("--dump", dump, "print the configuration as JSON");
    add_common(cfg_cmd, ov);
    ov.add<std::uint64_t>(cfg_cmd, "--seed", "eval", "seed", "experiment seed");

    auto* synth = app.add_subcommand("synth", "write the configured chirp mixture");
    std::string synth_out, synth_format = "float32";
    synth->add_option("--out", synth_out, "output file (.wav, or raw float64 with --format raw)")->required();
    synth->add_option("--format", synth_format, "pcm16, float32 or raw")
        ->check(CLI::IsMember({"pcm16", "float32", "raw"}));
    add_common(synth, ov);
    ov.add_nullable(synth, "--snr", "signal", "snr_db", "noise level in dB");
    ov.add<std::uint64_t>(synth, "--seed", "signal", "seed", "noise seed");

    auto* analyze_cmd = app.add_subcommand("analyze", "estimate chirp atoms from a signal");
    std::string an_in, an_out;
    analyze_cmd->add_option("--in", an_in, "input .wav or raw float64 file")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--out", an_out, "atom dump (.json or .csv)")->required();
    add_common(analyze_cmd, ov);

    auto* track = app.add_subcommand("track", "link atoms into partial trajectories");
    std::string tr_in, tr_out, tr_dump;
    track->add_option("--atoms", tr_in, "atom dump from analyze")->required()->check(CLI::ExistingFile);
    track->add_option("--out", tr_out, "path set JSON")->required();
    track->add_option("--dump-problem", tr_dump, "write the LP matrices to this directory");
    add_common(track, ov);

    auto* eval = app.add_subcommand("eval", "run the SNR sweep and write metrics");
    std::string ev_out, ev_svg;
    eval->add_option("--out", ev_out, "metrics JSON")->required();
    eval->add_option("--svg", ev_svg, "also write the plot grid");
    add_common(eval, ov);
    ov.add<std::uint64_t>(eval, "--seed", "eval", "seed", "experiment seed");
    ov.add<Index>(eval, "--trials", "eval", "trials", "trials per SNR");
    ov.add<double>(eval, "--tolerance", "eval", "tolerance_hz", "match tolerance in Hz");
    ov.add<bool>(eval, "--timing", "eval", "timing", "record stage timings (true/false)");
    eval->add_option_function<std::vector<std::string>>(
        "--snr-list",
        [&ov](const std::vector<std::string>& v) {
            json list = json::array();
            for (const std::string& s : v)
                list.push_back(s == "inf" || s == "clean" ? json(nullptr) : json(parse_number("--snr-list", s)));
            ov.patch["eval"]["snr_list"] = list;
        },
        "SNRs in dB, comma separated ('clean' for no noise)")
        ->delimiter(',');

    auto* plot = app.add_subcommand("plot", "render atoms and paths as SVG");
    std::string pl_out, pl_atoms, pl_paths, pl_which = "lp";
    plot->add_option("--out", pl_out, "SVG file")->required();
    plot->add_option("--atoms", pl_atoms, "atom dump; without it the experiment grid is plotted")
        ->check(CLI::ExistingFile);
    plot->add_option("--paths", pl_paths, "path set JSON from track")->check(CLI::ExistingFile);
    plot->add_option("--which", pl_which, "path set to draw from track output")
        ->check(CLI::IsMember({"lp", "greedy"}));
    add_common(plot, ov);
    ov.add<std::uint64_t>(plot, "--seed", "eval", "seed", "experiment seed");

    auto* bench = app.add_subcommand("bench", "greedy search-space counts and LP timing");
    std::string bn_out;
    Index bn_trials = 3;
    std::uint64_t bn_seed = 1;
    bench->add_option("--out", bn_out, "table JSON");
    bench->add_option("--trials", bn_trials, "random lattices per cell");
    bench->add_option("--seed", bn_seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*cfg_cmd)
            return run_config(ov, dump);
        if (*synth)
            return run_synth(ov, synth_out, synth_format);
        if (*analyze_cmd)
            return run_analyze(ov, an_in, an_out);
        if (*track)
            return run_track(ov, tr_in, tr_out, tr_dump);
        if (*eval)
            return run_eval(ov, ev_out, ev_svg);
        if (*plot)
            return run_plot(ov, pl_out, pl_atoms, pl_paths, pl_which);
        if (*bench)
            return run_bench(bn_out, bn_trials, bn_seed);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const ConsistencyError& e) {
        std::cerr << "internal consistency failure: " << e.what() << '\n';
        return kConsistency;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    return kOk;
}
