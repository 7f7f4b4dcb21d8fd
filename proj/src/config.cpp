#include "ptrack/config.hpp"

#include "ptrack/errors.hpp"

#include <cmath>
#include <fstream>

namespace ptrack {
namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

double null_as_inf(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

} // namespace

void merge_overrides(json& base, const json& patch)
{
    if (!patch.is_object() || !base.is_object()) {
        base = patch;
        return;
    }
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object())
            merge_overrides(base[key], value);
        else
            base[key] = value;
    }
}

Method parse_method(const std::string& name)
{
    if (name == "greedy")
        return Method::greedy;
    if (name == "lp")
        return Method::lp;
    if (name == "both")
        return Method::both;
    throw InvalidInput("unknown method '" + name + "' (expected greedy, lp or both)");
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::greedy: return "greedy";
    case Method::lp: return "lp";
    case Method::both: return "both";
    }
    return "both";
}

json to_json(const RunConfig& cfg)
{
    const ExperimentConfig& e = cfg.experiment;
    json chirps = json::array();
    for (const ChirpTrack& c : e.signal.chirps)
        chirps.push_back({{"f0_hz", c.f0_hz}, {"f1_hz", c.f1_hz}, {"phi", c.phi}});
    json snrs = json::array();
    for (double s : e.eval.snr_list)
        snrs.push_back(number_or_null(s));
    return {
        {"signal",
         {{"chirps", chirps},
          {"fs", e.signal.fs},
          {"duration", e.signal.duration},
          {"snr_db", number_or_null(e.signal.snr_db)},
          {"seed", e.signal.seed},
          {"complex", e.signal.complex}}},
        {"window", {{"coeffs", e.window_coeffs}}},
        {"stft", {{"win_len", e.stft.win_len}, {"hop", e.stft.hop}, {"fft_len", e.stft.fft_len}}},
        {"peaks",
         {{"band_width", e.peaks.band_width},
          {"band_spacing", e.peaks.band_spacing},
          {"f_min", e.peaks.f_min},
          {"f_max", e.peaks.f_max},
          {"floor_db", e.peaks.floor_db}}},
        {"tracking",
         {{"delta_mq", number_or_null(e.tracking.delta_mq)},
          {"delta_lp", number_or_null(e.tracking.delta_lp)},
          {"L", e.tracking.paths},
          {"k_mq", e.tracking.k_mq},
          {"method", to_string(cfg.method)}}},
        {"eval",
         {{"snr_list", snrs},
          {"trials", e.eval.trials},
          {"tolerance_hz", e.eval.tolerance_hz},
          {"seed", e.eval.seed},
          {"timing", e.eval.timing}}},
    };
}

RunConfig load_config(const json& overrides)
{
    if (!overrides.is_object() && !overrides.is_null())
        throw InvalidInput("config must be a JSON object");
    json j = to_json(RunConfig{});
    for (const auto& [key, value] : overrides.items()) {
        if (!j.contains(key))
            throw InvalidInput("unknown config section '" + key + "'");
        if (!value.is_object())
            throw InvalidInput("config section '" + key + "' must be an object");
        for (const auto& [field, v] : value.items())
            if (!j[key].contains(field))
                throw InvalidInput("unknown config key '" + key + "." + field + "'");
    }
    if (!overrides.is_null())
        merge_overrides(j, overrides);

    RunConfig cfg;
    ExperimentConfig& e = cfg.experiment;
    try {
        const json& s = j.at("signal");
        e.signal.chirps.clear();
        for (const json& c : s.at("chirps"))
            e.signal.chirps.push_back({c.at("f0_hz").get<double>(), c.at("f1_hz").get<double>(), c.value("phi", 0.0)});
        e.signal.fs = s.at("fs").get<double>();
        e.signal.duration = s.at("duration").get<double>();
        e.signal.snr_db = null_as_inf(s.at("snr_db"));
        e.signal.seed = s.at("seed").get<std::uint64_t>();
        e.signal.complex = s.at("complex").get<bool>();

        e.window_coeffs = j.at("window").at("coeffs").get<std::array<double, 4>>();

        const json& st = j.at("stft");
        e.stft.win_len = st.at("win_len").get<Index>();
        e.stft.hop = st.at("hop").get<Index>();
        e.stft.fft_len = st.at("fft_len").get<Index>();
        e.stft.fs = e.signal.fs;

        const json& pk = j.at("peaks");
        e.peaks.band_width = pk.at("band_width").get<double>();
        e.peaks.band_spacing = pk.at("band_spacing").get<double>();
        e.peaks.f_min = pk.at("f_min").get<double>();
        e.peaks.f_max = pk.at("f_max").get<double>();
        e.peaks.floor_db = pk.at("floor_db").get<double>();

        const json& tr = j.at("tracking");
        e.tracking.delta_mq = null_as_inf(tr.at("delta_mq"));
        e.tracking.delta_lp = null_as_inf(tr.at("delta_lp"));
        e.tracking.paths = tr.at("L").get<Index>();
        e.tracking.k_mq = tr.at("k_mq").get<Index>();
        cfg.method = parse_method(tr.at("method").get<std::string>());

        const json& ev = j.at("eval");
        e.eval.snr_list.clear();
        for (const json& v : ev.at("snr_list"))
            e.eval.snr_list.push_back(v.is_null() ? kNoNoise : v.get<double>());
        e.eval.trials = ev.at("trials").get<Index>();
        e.eval.tolerance_hz = ev.at("tolerance_hz").get<double>();
        e.eval.seed = ev.at("seed").get<std::uint64_t>();
        e.eval.timing = ev.at("timing").get<bool>();
    } catch (const json::exception& ex) {
        throw InvalidInput(std::string("bad config: ") + ex.what());
    }
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open config " + path.string());
    try {
        return load_config(json::parse(in));
    } catch (const json::parse_error& ex) {
        throw InvalidInput(std::string("config is not valid JSON: ") + ex.what());
    }
}

void validate(const RunConfig& cfg, bool for_experiment)
{
    const ExperimentConfig& e = cfg.experiment;
    if (for_experiment) {
        validate(e);
        return;
    }
    const AnalysisConfig a = e.analysis();
    validate(a.stft);
    validate(a.peaks);
    validate(a.window);
    if (!(e.signal.fs > 0) || !(e.signal.duration > 0))
        throw InvalidInput("sample rate and duration must be positive");
    for (const ChirpSpec& s : e.signal.specs())
        validate(s, e.signal.n_samples());
    if (e.tracking.paths < 1 || e.tracking.k_mq < 2)
        throw InvalidInput("need L >= 1 and K_MQ >= 2");
    if (!(e.tracking.delta_lp >= 0) || !(e.tracking.delta_mq >= 0))
        throw InvalidInput("thresholds must be non-negative");
}

} // namespace ptrack
