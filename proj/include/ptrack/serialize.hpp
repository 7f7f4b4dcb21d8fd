#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/config.hpp"
#include "ptrack/eval.hpp"
#include "ptrack/lattice.hpp"
#include "ptrack/lpsolve.hpp"
#include "ptrack/paths.hpp"

#include <json.hpp>

#include <filesystem>

namespace ptrack {

using nlohmann::json;

void to_json(json& j, const ChirpAtom& a);
void from_json(const json& j, ChirpAtom& a);

/// {"frames": K, "fs", "hop", "win_len", "atoms": [{frame, phi, omega, psi, power, bin}, ...]}
json lattice_to_json(const Lattice& lat);
Lattice lattice_from_json(const json& j);

/// Chooses JSON or CSV from the extension (.csv -> CSV). The CSV form keeps
/// the same columns and carries K, fs, hop and win_len on a leading
/// "# frames=..." comment line. An empty file reads as an empty lattice.
void write_atoms(const std::filesystem::path& path, const Lattice& lat);
Lattice read_atoms(const std::filesystem::path& path);

/// {"pairs": [[i, j], ...], "costs": [...], "delta": d}; an infinite delta is written as null.
json pairs_to_json(const PairSet& ps);
PairSet pairs_from_json(const json& j);

/// {"paths": [[m, ...], ...], "costs": [...], "method", "total_cost", "early_stop"}
json pathset_to_json(const PathSet& ps);
PathSet pathset_from_json(const json& j);

/// Writes header.json plus c.txt, G.txt, h.txt, A.txt, b.txt into `dir`.
/// Matrices are "row col value" triplets; vectors are "index value" lines
/// holding only nonzeros (c holds every entry).
void write_problem(const std::filesystem::path& dir, const TrackingProblem& p);

struct ProblemDump {
    Eigen::VectorXd c, h, b;
    SparseMatrix G, A;
    json header;
};

ProblemDump read_problem(const std::filesystem::path& dir);

inline constexpr int kMetricsSchemaVersion = 1;

json metrics_to_json(const TrajectoryMetrics& m, bool timing);
json experiment_to_json(const ExperimentResult& res, const ExperimentConfig& cfg);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace ptrack
