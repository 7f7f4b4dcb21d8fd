#include "ptrack/eval.hpp"

#include "ptrack/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace ptrack {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double to_hz(double omega, double fs) { return omega * fs / (2.0 * std::numbers::pi); }

MethodSummary summarize(const std::vector<const TrajectoryMetrics*>& runs, Index chirps, Index L, Index K)
{
    MethodSummary s;
    for (Index q = 0; q < chirps; ++q) {
        std::vector<double> cov, err;
        for (const TrajectoryMetrics* m : runs) {
            cov.push_back(m->chirps[std::size_t(q)].coverage);
            err.push_back(m->chirps[std::size_t(q)].mean_error_hz);
        }
        s.coverage.push_back(median(cov));
        s.chirp_error_hz.push_back(median(err));
    }
    std::vector<double> overall;
    for (const TrajectoryMetrics* m : runs) {
        overall.push_back(m->mean_error_hz);
        s.feasible_trials += m->feasible;
        s.full_span_trials += m->feasible && m->path_count == L && m->full_span_paths == L && K > 0;
    }
    s.mean_error_hz = median(overall);
    return s;
}

} // namespace

Index SignalConfig::n_samples() const { return Index(std::llround(duration * fs)); }

std::vector<ChirpSpec> SignalConfig::specs() const
{
    std::vector<ChirpSpec> out;
    for (const ChirpTrack& c : chirps)
        out.push_back(ChirpSpec::from_frequencies(c.f0_hz, c.f1_hz, fs, n_samples(), c.phi));
    return out;
}

SignalBuffer synth_mixture(const SignalConfig& cfg)
{
    if (cfg.chirps.empty())
        throw InvalidInput("no chirps configured");
    std::vector<SignalBuffer> parts;
    for (const ChirpSpec& s : cfg.specs())
        parts.push_back(synth_chirp(s, cfg.n_samples(), cfg.fs,
                                    cfg.complex ? Synthesis::complex : Synthesis::real_part));
    return mix(parts);
}

AnalysisConfig ExperimentConfig::analysis() const
{
    AnalysisConfig a;
    a.stft = stft;
    a.stft.fs = signal.fs;
    a.peaks = peaks;
    a.window.coeffs = window_coeffs;
    a.window.length = stft.win_len;
    return a;
}

void validate(const ExperimentConfig& cfg)
{
    const AnalysisConfig a = cfg.analysis();
    validate(a.stft);
    validate(a.peaks);
    validate(a.window);
    if (cfg.signal.n_samples() < cfg.stft.win_len)
        throw InvalidInput("signal shorter than one analysis window");
    for (const ChirpTrack& c : cfg.signal.chirps)
        for (double f : {c.f0_hz, c.f1_hz})
            if (f < cfg.peaks.f_min || f > cfg.peaks.f_max)
                throw InvalidInput("chirp track leaves the [f_min, f_max] search band");
    for (const ChirpSpec& s : cfg.signal.specs())
        validate(s, cfg.signal.n_samples());
    if (cfg.tracking.paths < 1 || cfg.tracking.k_mq < 2)
        throw InvalidInput("need L >= 1 and K_MQ >= 2");
    if (!(cfg.tracking.delta_lp >= 0) || !(cfg.tracking.delta_mq >= 0))
        throw InvalidInput("thresholds must be non-negative");
    if (cfg.eval.trials < 1 || !(cfg.eval.tolerance_hz > 0))
        throw InvalidInput("need at least one trial and a positive tolerance");
}

double truth_hz(const ChirpSpec& spec, const Lattice& lat, Index k)
{
    return to_hz(spec.omega_at(lat.frame_center(k)), lat.fs);
}

TrajectoryMetrics score_paths(const PathSet& ps, const Lattice& lat, std::span<const ChirpSpec> truth,
                              double tolerance_hz)
{
    const FrameLayout layout = lat.layout();
    const Index Q = Index(truth.size());
    const Index K = lat.frame_count();
    TrajectoryMetrics m;
    m.chirps.resize(std::size_t(Q));
    m.path_count = ps.size();
    m.early_stop = ps.early_stop;

    std::vector<std::set<Index>> covered(static_cast<std::size_t>(Q));
    std::vector<double> err_sum(std::size_t(Q), 0.0), err_max(std::size_t(Q), 0.0);
    std::vector<Index> err_n(std::size_t(Q), 0);
    double all_sum = 0.0, all_max = 0.0;
    Index all_n = 0;

    auto error = [&](Index node, Index q) {
        const ChirpAtom& a = lat.node(layout, node);
        return std::abs(to_hz(a.omega, lat.fs) - truth_hz(truth[std::size_t(q)], lat, a.frame));
    };

    for (const Path& p : ps.paths) {
        if (Index(p.nodes.size()) == K)
            ++m.full_span_paths;
        if (Q == 0 || p.nodes.empty()) {
            m.assignment.push_back(-1);
            continue;
        }
        Index best = 0;
        double best_err = kInf;
        for (Index q = 0; q < Q; ++q) {
            double s = 0.0;
            for (Index node : p.nodes)
                s += error(node, q);
            s /= double(p.nodes.size());
            if (s < best_err) {
                best_err = s;
                best = q;
            }
        }
        m.assignment.push_back(best);
        auto& cm = m.chirps[std::size_t(best)];
        ++cm.paths;
        for (Index node : p.nodes) {
            const double e = error(node, best);
            err_sum[std::size_t(best)] += e;
            err_max[std::size_t(best)] = std::max(err_max[std::size_t(best)], e);
            ++err_n[std::size_t(best)];
            all_sum += e;
            all_max = std::max(all_max, e);
            ++all_n;
            if (e <= tolerance_hz)
                covered[std::size_t(best)].insert(layout.frame_of(node));
        }
    }
    for (Index q = 0; q < Q; ++q) {
        auto& cm = m.chirps[std::size_t(q)];
        cm.coverage = K > 0 ? double(covered[std::size_t(q)].size()) / double(K) : 0.0;
        if (err_n[std::size_t(q)] > 0) {
            cm.mean_error_hz = err_sum[std::size_t(q)] / double(err_n[std::size_t(q)]);
            cm.max_error_hz = err_max[std::size_t(q)];
        }
    }
    if (all_n > 0) {
        m.mean_error_hz = all_sum / double(all_n);
        m.max_error_hz = all_max;
    }
    return m;
}

double median(std::vector<double> values)
{
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    for (double& v : values)
        if (std::isnan(v))
            v = kInf;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double mid = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return std::isinf(mid) ? std::numeric_limits<double>::quiet_NaN() : mid;
}

std::uint64_t trial_seed(const EvalConfig& cfg, Index snr_index, Index trial)
{
    return cfg.seed * 1000003ULL + std::uint64_t(snr_index) * 1000ULL + std::uint64_t(trial);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    validate(cfg);
    const AnalysisConfig acfg = cfg.analysis();
    const std::vector<ChirpSpec> truth = cfg.signal.specs();
    const CostFn d = CostFn::prediction_error(double(cfg.stft.hop));
    const TrackingConfig& tc = cfg.tracking;

    ExperimentResult res;
    for (Index s = 0; s < Index(cfg.eval.snr_list.size()); ++s) {
        const double snr = cfg.eval.snr_list[std::size_t(s)];
        for (Index t = 0; t < cfg.eval.trials; ++t) {
            TrialResult tr;
            tr.snr_db = snr;
            tr.trial = t;
            tr.seed = trial_seed(cfg.eval, s, t);

            auto t0 = Clock::now();
            const SignalBuffer clean = synth_mixture(cfg.signal);
            const SignalBuffer noisy = add_noise(clean, snr, tr.seed);
            tr.achieved_snr_db = measured_snr_db(clean, noisy);
            StageTimes times;
            times.synth = seconds_since(t0);

            t0 = Clock::now();
            tr.lattice = analyze(noisy, acfg);
            times.analysis = seconds_since(t0);

            t0 = Clock::now();
            std::string lp_note;
            bool lp_ok = true;
            try {
                tr.lp = track_lp(tr.lattice, d, tc.paths, tc.delta_lp);
            } catch (const InfeasibleError& e) {
                lp_ok = false;
                lp_note = e.what();
                tr.lp = PathSet{};
                tr.lp.method = "lp";
            }
            StageTimes lp_times = times;
            lp_times.tracking = seconds_since(t0);

            t0 = Clock::now();
            tr.greedy = chain_short_paths(tr.lattice, d, tc.paths, tc.delta_mq, tc.k_mq);
            StageTimes greedy_times = times;
            greedy_times.tracking = seconds_since(t0);

            tr.lp_metrics = score_paths(tr.lp, tr.lattice, truth, cfg.eval.tolerance_hz);
            tr.lp_metrics.feasible = lp_ok;
            tr.lp_metrics.note = lp_note;
            tr.greedy_metrics = score_paths(tr.greedy, tr.lattice, truth, cfg.eval.tolerance_hz);
            if (cfg.eval.timing) {
                tr.lp_metrics.timing = lp_times;
                tr.greedy_metrics.timing = greedy_times;
            }
            res.trials.push_back(std::move(tr));
        }

        // the trials of this SNR are the last ones appended
        std::vector<const TrajectoryMetrics*> lp_runs, greedy_runs;
        const Index K = res.trials.back().lattice.frame_count();
        for (auto it = res.trials.end() - cfg.eval.trials; it != res.trials.end(); ++it) {
            lp_runs.push_back(&it->lp_metrics);
            greedy_runs.push_back(&it->greedy_metrics);
        }
        SnrSummary sum;
        sum.snr_db = snr;
        sum.lp = summarize(lp_runs, Index(truth.size()), tc.paths, K);
        sum.greedy = summarize(greedy_runs, Index(truth.size()), tc.paths, K);
        res.summary.push_back(std::move(sum));
    }
    return res;
}

TransitionCosts random_transition_costs(const FrameLayout& layout, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::uint32_t> dist(0, 1u << 20);
    TransitionCosts out;
    for (Index k = 0; k + 1 < layout.frame_count(); ++k) {
        Eigen::MatrixXd m(layout.size(k), layout.size(k + 1));
        for (Index i = 0; i < m.size(); ++i)
            m.data()[i] = std::ldexp(double(dist(gen)), -20);
        out.push_back(std::move(m));
    }
    return out;
}

ScalingReport scaling_benchmark(std::span<const Index> n_range, std::span<const Index> k_range,
                                std::span<const Index> l_range, Index trials, std::uint64_t seed)
{
    if (trials < 1)
        throw InvalidInput("need at least one trial");
    ScalingReport rep;
    std::vector<double> log_p, log_t;
    std::uint64_t s = seed;
    for (Index N : n_range) {
        for (Index K : k_range) {
            if (N < 1 || K < 2)
                throw InvalidInput("scaling benchmark needs N >= 1 and K >= 2");
            const FrameLayout layout(std::vector<Index>(std::size_t(K), N));

            // greedy: exhaustive enumeration, counted per step
            Index l_max = 0;
            for (Index l : l_range)
                if (l < N)
                    l_max = std::max(l_max, l);
            const TransitionCosts costs = random_transition_costs(layout, s++);
            GreedyOptions exhaustive;
            exhaustive.prune = false;
            const TupleSelection sel = greedy_tuples(costs, l_max + 1, kInf, exhaustive);

            // LP: median wall time per solve, repeating until the clock is meaningful
            const Index L = std::min<Index>(2, N);
            const PairSet ps = build_pairs(layout, costs, kInf);
            std::vector<double> times;
            for (Index t = 0; t < trials; ++t) {
                Index reps = 0;
                const auto t0 = Clock::now();
                double elapsed = 0.0;
                do {
                    const TrackingProblem p = build_problem(ps, layout, L);
                    const Eigen::VectorXd x = solve(p);
                    if (x.size() != ps.size())
                        throw ConsistencyError("solver returned the wrong size");
                    ++reps;
                    elapsed = seconds_since(t0);
                } while (elapsed < 0.02);
                times.push_back(elapsed / double(reps));
            }
            const double lp_time = median(times);
            log_p.push_back(std::log(double(ps.size())));
            log_t.push_back(std::log(lp_time));

            for (Index l : l_range) {
                if (l >= N)
                    continue;
                ScalingRow row;
                row.nodes = N;
                row.frames = K;
                row.step = l;
                row.greedy_candidates = sel.candidates.at(std::size_t(l));
                row.expected_candidates = 1;
                for (Index k = 0; k < K; ++k)
                    row.expected_candidates *= std::uint64_t(N - l);
                row.pairs = ps.size();
                row.lp_seconds = lp_time;
                rep.counts_match = rep.counts_match && row.greedy_candidates == row.expected_candidates;
                rep.rows.push_back(row);
            }
        }
    }
    if (log_p.size() >= 2) {
        const Eigen::Map<const Eigen::VectorXd> x(log_p.data(), Index(log_p.size()));
        const Eigen::Map<const Eigen::VectorXd> y(log_t.data(), Index(log_t.size()));
        const double mx = x.mean(), my = y.mean();
        const double sxx = (x.array() - mx).square().sum();
        rep.lp_loglog_slope = sxx > 0 ? ((x.array() - mx) * (y.array() - my)).sum() / sxx : 0.0;
    }
    return rep;
}

} // namespace ptrack
