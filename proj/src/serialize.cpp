#include "ptrack/serialize.hpp"

#include "ptrack/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ptrack {
namespace {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json nan_as_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_triplets(const std::filesystem::path& path, const SparseMatrix& m)
{
    std::ostringstream os;
    for (Index r = 0; r < m.rows(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            os << r << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    write_text_file(path, os.str());
}

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v, bool dense)
{
    std::ostringstream os;
    for (Index i = 0; i < v.size(); ++i)
        if (dense || v[i] != 0.0)
            os << i << ' ' << format_double(v[i]) << '\n';
    write_text_file(path, os.str());
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open " + path.string());
    return in;
}

SparseMatrix read_triplets(const std::filesystem::path& path, Index rows, Index cols)
{
    std::ifstream in = open_in(path);
    std::vector<Eigen::Triplet<double>> t;
    Index r, c;
    double v;
    while (in >> r >> c >> v) {
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw InvalidInput("triplet out of range in " + path.string());
        t.emplace_back(r, c, v);
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::VectorXd read_vector(const std::filesystem::path& path, Index n)
{
    std::ifstream in = open_in(path);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    Index i;
    double x;
    while (in >> i >> x) {
        if (i < 0 || i >= n)
            throw InvalidInput("index out of range in " + path.string());
        v[i] = x;
    }
    return v;
}

} // namespace

void to_json(json& j, const ChirpAtom& a)
{
    j = {{"frame", a.frame}, {"phi", a.phi}, {"omega", a.omega}, {"psi", a.psi}, {"power", a.power}, {"bin", a.bin}};
}

void from_json(const json& j, ChirpAtom& a)
{
    a.frame = j.at("frame").get<Index>();
    a.phi = j.at("phi").get<double>();
    a.omega = j.at("omega").get<double>();
    a.psi = j.at("psi").get<double>();
    a.power = j.at("power").get<double>();
    a.bin = j.at("bin").get<Index>();
}

json lattice_to_json(const Lattice& lat)
{
    json atoms = json::array();
    for (const auto& frame : lat.frames)
        for (const ChirpAtom& a : frame)
            atoms.push_back(a);
    return {{"frames", lat.frame_count()}, {"fs", lat.fs}, {"hop", lat.hop}, {"win_len", lat.win_len}, {"atoms", atoms}};
}

Lattice lattice_from_json(const json& j)
{
    Lattice lat;
    try {
        lat.fs = j.value("fs", 0.0);
        lat.hop = j.value("hop", Index(0));
        lat.win_len = j.value("win_len", Index(0));
        lat.frames.resize(std::size_t(j.at("frames").get<Index>()));
        for (const json& rec : j.at("atoms")) {
            ChirpAtom a = rec.get<ChirpAtom>();
            if (a.frame < 0 || a.frame >= lat.frame_count())
                throw InvalidInput("atom frame index out of range");
            lat.frames[std::size_t(a.frame)].push_back(a);
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad atom dump: ") + e.what());
    }
    return lat;
}

void write_atoms(const std::filesystem::path& path, const Lattice& lat)
{
    if (path.extension() != ".csv") {
        write_text_file(path, lattice_to_json(lat).dump(1) + "\n");
        return;
    }
    std::ostringstream os;
    os << "# frames=" << lat.frame_count() << " fs=" << format_double(lat.fs) << " hop=" << lat.hop
       << " win_len=" << lat.win_len << '\n';
    os << "frame,phi,omega,psi,power,bin\n";
    for (const auto& frame : lat.frames)
        for (const ChirpAtom& a : frame)
            os << a.frame << ',' << format_double(a.phi) << ',' << format_double(a.omega) << ','
               << format_double(a.psi) << ',' << format_double(a.power) << ',' << a.bin << '\n';
    write_text_file(path, os.str());
}

Lattice read_atoms(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return Lattice{};
    if (path.extension() != ".csv") {
        try {
            return lattice_from_json(json::parse(text));
        } catch (const json::parse_error& e) {
            throw InvalidInput(std::string("atom dump is not valid JSON: ") + e.what());
        }
    }

    Lattice lat;
    std::istringstream lines(text);
    std::string line;
    Index frames = -1;
    while (std::getline(lines, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string kv;
            while (meta >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                if (key == "frames")
                    frames = std::stoll(val);
                else if (key == "fs")
                    lat.fs = std::stod(val);
                else if (key == "hop")
                    lat.hop = std::stoll(val);
                else if (key == "win_len")
                    lat.win_len = std::stoll(val);
            }
            continue;
        }
        if (line.rfind("frame,", 0) == 0)
            continue;
        ChirpAtom a;
        char c1, c2, c3, c4, c5;
        std::istringstream row(line);
        if (!(row >> a.frame >> c1 >> a.phi >> c2 >> a.omega >> c3 >> a.psi >> c4 >> a.power >> c5 >> a.bin))
            throw InvalidInput("malformed CSV atom row: " + line);
        if (frames < 0)
            throw InvalidInput("CSV atom dump lacks the '# frames=' header");
        if (a.frame < 0 || a.frame >= frames)
            throw InvalidInput("atom frame index out of range");
        lat.frames.resize(std::size_t(frames));
        lat.frames[std::size_t(a.frame)].push_back(a);
    }
    lat.frames.resize(std::size_t(std::max<Index>(frames, 0)));
    return lat;
}

json pairs_to_json(const PairSet& ps)
{
    json pairs = json::array();
    for (const NodePair& p : ps.pairs)
        pairs.push_back({p.from, p.to});
    std::vector<double> costs(ps.costs.data(), ps.costs.data() + ps.costs.size());
    return {{"pairs", pairs}, {"costs", costs}, {"delta", nan_as_null(ps.delta)}};
}

PairSet pairs_from_json(const json& j)
{
    PairSet ps;
    try {
        for (const json& p : j.at("pairs"))
            ps.pairs.push_back({p.at(0).get<Index>(), p.at(1).get<Index>()});
        const auto costs = j.at("costs").get<std::vector<double>>();
        ps.costs = Eigen::Map<const Eigen::VectorXd>(costs.data(), Index(costs.size()));
        ps.delta = j.at("delta").is_null() ? kInf : j.at("delta").get<double>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad pair set: ") + e.what());
    }
    if (ps.costs.size() != ps.size())
        throw InvalidInput("pair set has mismatched pairs and costs");
    return ps;
}

json pathset_to_json(const PathSet& ps)
{
    json paths = json::array(), costs = json::array();
    for (const Path& p : ps.paths) {
        paths.push_back(p.nodes);
        costs.push_back(p.cost);
    }
    return {{"paths", paths}, {"costs", costs}, {"method", ps.method}, {"total_cost", ps.total_cost},
            {"early_stop", ps.early_stop}};
}

PathSet pathset_from_json(const json& j)
{
    PathSet ps;
    try {
        const auto& paths = j.at("paths");
        const auto& costs = j.at("costs");
        if (paths.size() != costs.size())
            throw InvalidInput("path and cost counts differ");
        for (std::size_t i = 0; i < paths.size(); ++i)
            ps.paths.push_back({paths[i].get<std::vector<Index>>(), costs[i].get<double>()});
        ps.method = j.at("method").get<std::string>();
        ps.total_cost = j.value("total_cost", 0.0);
        ps.early_stop = j.value("early_stop", false);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad path set: ") + e.what());
    }
    return ps;
}

void write_problem(const std::filesystem::path& dir, const TrackingProblem& p)
{
    std::filesystem::create_directories(dir);
    const json header = {
        {"format", "ptrack-lp-triplets"},
        {"version", 1},
        {"sense", "minimize c'x subject to G x <= h, A x = b"},
        {"variables", p.size()},
        {"G_rows", p.G.rows()},
        {"A_rows", p.A.rows()},
        {"L", p.paths},
        {"frame_sizes", p.layout.sizes()},
        {"full", p.full},
        {"blocks", {{"rows_in", p.rows_in}, {"rows_out", p.rows_out}, {"rows_balance", p.rows_balance},
                    {"rows_count", p.rows_count}}},
    };
    write_text_file(dir / "header.json", header.dump(2) + "\n");
    write_vector(dir / "c.txt", p.c, true);
    write_triplets(dir / "G.txt", p.G);
    write_vector(dir / "h.txt", p.h, false);
    write_triplets(dir / "A.txt", p.A);
    write_vector(dir / "b.txt", p.b, false);
}

ProblemDump read_problem(const std::filesystem::path& dir)
{
    ProblemDump d;
    d.header = read_json_file(dir / "header.json");
    const Index n = d.header.at("variables").get<Index>();
    const Index gr = d.header.at("G_rows").get<Index>();
    const Index ar = d.header.at("A_rows").get<Index>();
    d.c = read_vector(dir / "c.txt", n);
    d.G = read_triplets(dir / "G.txt", gr, n);
    d.h = read_vector(dir / "h.txt", gr);
    d.A = read_triplets(dir / "A.txt", ar, n);
    d.b = read_vector(dir / "b.txt", ar);
    return d;
}

json metrics_to_json(const TrajectoryMetrics& m, bool timing)
{
    json chirps = json::array();
    for (const ChirpMetrics& c : m.chirps)
        chirps.push_back({{"coverage", c.coverage}, {"mean_error_hz", nan_as_null(c.mean_error_hz)},
                          {"max_error_hz", nan_as_null(c.max_error_hz)}, {"paths", c.paths}});
    json j = {
        {"feasible", m.feasible},
        {"early_stop", m.early_stop},
        {"path_count", m.path_count},
        {"full_span_paths", m.full_span_paths},
        {"mean_error_hz", nan_as_null(m.mean_error_hz)},
        {"max_error_hz", nan_as_null(m.max_error_hz)},
        {"assignment", m.assignment},
        {"chirps", chirps},
    };
    if (!m.note.empty())
        j["note"] = m.note;
    if (timing)
        j["timing"] = {{"synth_s", m.timing.synth}, {"analysis_s", m.timing.analysis},
                       {"tracking_s", m.timing.tracking}};
    return j;
}

json experiment_to_json(const ExperimentResult& res, const ExperimentConfig& cfg)
{
    RunConfig rc;
    rc.experiment = cfg;
    json trials = json::array();
    for (const TrialResult& t : res.trials) {
        trials.push_back({
            {"snr_db", nan_as_null(t.snr_db)},
            {"trial", t.trial},
            {"seed", t.seed},
            {"achieved_snr_db", nan_as_null(t.achieved_snr_db)},
            {"frames", t.lattice.frame_count()},
            {"nodes", t.lattice.node_count()},
            {"lp", metrics_to_json(t.lp_metrics, cfg.eval.timing)},
            {"greedy", metrics_to_json(t.greedy_metrics, cfg.eval.timing)},
        });
    }
    json summary = json::array();
    auto method = [](const MethodSummary& m) {
        json cov = json::array(), err = json::array();
        for (double v : m.coverage)
            cov.push_back(nan_as_null(v));
        for (double v : m.chirp_error_hz)
            err.push_back(nan_as_null(v));
        return json{{"coverage", cov},
                    {"chirp_mean_error_hz", err},
                    {"mean_error_hz", nan_as_null(m.mean_error_hz)},
                    {"full_span_trials", m.full_span_trials},
                    {"feasible_trials", m.feasible_trials}};
    };
    for (const SnrSummary& s : res.summary)
        summary.push_back({{"snr_db", nan_as_null(s.snr_db)}, {"lp", method(s.lp)}, {"greedy", method(s.greedy)}});
    return {{"schema_version", kMetricsSchemaVersion}, {"config", to_json(rc)}, {"trials", trials}, {"summary", summary}};
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot write " + path.string());
    out << text;
    if (!out)
        throw InvalidInput("write failed for " + path.string());
}

} // namespace ptrack
