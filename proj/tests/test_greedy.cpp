#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptrack/errors.hpp"
#include "ptrack/eval.hpp"
#include "ptrack/greedy.hpp"
#include "ptrack/paths.hpp"
#include "ptrack/signal.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

using namespace ptrack;
using ptrack::testing::all_tuples;
using ptrack::testing::table_instance;

namespace {

Eigen::MatrixXd pathological()
{
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 3, 100;
    return m;
}

std::uint64_t product_of_remaining(const std::vector<Index>& sizes, Index l)
{
    std::uint64_t p = 1;
    for (Index n : sizes)
        p *= std::uint64_t(std::max<Index>(n - l, 0));
    return p;
}

} // namespace

TEST_CASE("greedy takes the cheapest pair first and pays for it")
{
    const TransitionCosts costs{pathological()};
    const TupleSelection sel = greedy_tuples(costs, 2, kInf);
    REQUIRE(sel.tuples.size() == 2);
    CHECK(sel.tuples[0] == std::vector<Index>{0, 0});
    CHECK(sel.tuples[1] == std::vector<Index>{1, 1});
    CHECK(sel.total_costs[0] + sel.total_costs[1] == 101.0);
    CHECK_FALSE(sel.early_stop);
}

TEST_CASE("a zero threshold with positive costs selects nothing")
{
    const TransitionCosts costs{pathological()};
    const TupleSelection sel = greedy_tuples(costs, 2, 0.0);
    CHECK(sel.tuples.empty());
    CHECK(sel.early_stop);
}

TEST_CASE("threshold stops after the first tuple that breaks it")
{
    const TransitionCosts costs{pathological()};
    const TupleSelection sel = greedy_tuples(costs, 2, 50.0);
    REQUIRE(sel.tuples.size() == 1);
    CHECK(sel.early_stop);
}

TEST_CASE("ties go to the lexicographically first tuple")
{
    const TransitionCosts costs{Eigen::MatrixXd::Constant(3, 3, 0.5)};
    const TupleSelection sel = greedy_tuples(costs, 3, kInf);
    REQUIRE(sel.tuples.size() == 3);
    CHECK(sel.tuples[0] == std::vector<Index>{0, 0});
    CHECK(sel.tuples[1] == std::vector<Index>{1, 1});
    CHECK(sel.tuples[2] == std::vector<Index>{2, 2});
}

TEST_CASE("each step picks a minimum-cost remaining tuple")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Index K = 2 + Index(rng() % 3);
        const auto sizes = ptrack::testing::random_sizes(rng, K, 4);
        const TransitionCosts costs = random_transition_costs(FrameLayout(sizes), rng());
        Index L = sizes[0];
        for (Index n : sizes)
            L = std::min(L, n);

        for (bool prune : {false, true}) {
            const TupleSelection sel = greedy_tuples(costs, L, kInf, GreedyOptions{prune});
            REQUIRE(Index(sel.tuples.size()) == L);
            std::vector<std::set<Index>> used(sizes.size());
            for (std::size_t l = 0; l < sel.tuples.size(); ++l) {
                double best = kInf;
                std::vector<Index> arg;
                for (const auto& t : all_tuples(costs, sizes)) {
                    bool free = true;
                    for (std::size_t k = 0; k < sizes.size(); ++k)
                        free = free && !used[k].count(t.nodes[k]);
                    if (free && t.cost < best) {
                        best = t.cost;
                        arg = t.nodes;
                    }
                }
                CHECK(sel.total_costs[l] == best);
                CHECK(sel.tuples[l] == arg);
                for (std::size_t k = 0; k < sizes.size(); ++k) {
                    CHECK(used[k].insert(sel.tuples[l][k]).second);
                }
            }
        }
    }
}

TEST_CASE("exhaustive search evaluates prod (N_k - l) tuples at step l")
{
    std::mt19937_64 rng(8);
    for (Index N = 1; N <= 5; ++N) {
        for (Index K = 2; K <= 4; ++K) {
            const std::vector<Index> sizes(std::size_t(K), N);
            const TransitionCosts costs = random_transition_costs(FrameLayout(sizes), rng());
            const TupleSelection sel = greedy_tuples(costs, N, kInf, GreedyOptions{false});
            REQUIRE(Index(sel.candidates.size()) == N);
            for (Index l = 0; l < N; ++l)
                CHECK(sel.candidates[std::size_t(l)] == product_of_remaining(sizes, l));
        }
    }
    const std::vector<Index> ragged{3, 5, 2, 4};
    const TupleSelection sel = greedy_tuples(random_transition_costs(FrameLayout(ragged), 4), 2, kInf,
                                             GreedyOptions{false});
    CHECK(sel.candidates[0] == 120);
    CHECK(sel.candidates[1] == 2 * 4 * 1 * 3);
}

TEST_CASE("N=4, K=3 counts are 64 then 27")
{
    const std::vector<Index> sizes{4, 4, 4};
    const TupleSelection sel = greedy_tuples(random_transition_costs(FrameLayout(sizes), 9), 2, kInf,
                                             GreedyOptions{false});
    CHECK(sel.candidates[0] == 64);
    CHECK(sel.candidates[1] == 27);
}

TEST_CASE("pruning never evaluates more tuples than plain enumeration")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<Index> sizes(4, 4);
        const TransitionCosts costs = random_transition_costs(FrameLayout(sizes), rng());
        const TupleSelection plain = greedy_tuples(costs, 3, kInf, GreedyOptions{false});
        const TupleSelection pruned = greedy_tuples(costs, 3, kInf, GreedyOptions{true});
        CHECK(plain.tuples == pruned.tuples);
        for (std::size_t l = 0; l < plain.candidates.size(); ++l)
            CHECK(pruned.candidates[l] <= plain.candidates[l]);
    }
}

TEST_CASE("chaining a clean chirp gives one full path")
{
    AnalysisConfig a;
    const auto s = synth_chirp(ChirpSpec{0.0, 0.4, 1e-5}, 16000, a.stft.fs);
    const Lattice lat = analyze(s, a);
    const CostFn d = CostFn::prediction_error(double(lat.hop));
    const PathSet ps = chain_short_paths(lat, d, 1, 0.1, 3);
    REQUIRE(ps.size() == 1);
    const FrameLayout layout = lat.layout();
    REQUIRE(ps.paths[0].nodes.size() == 28);
    for (std::size_t k = 0; k < 28; ++k) {
        const ChirpAtom& n = lat.node(layout, ps.paths[0].nodes[k]);
        CHECK(n.frame == Index(k));
        CHECK(std::abs(n.omega - (0.4 + 1e-5 * lat.frame_center(Index(k)))) < 1e-3);
    }
    CHECK_NOTHROW(check_structure(ps, layout));
    CHECK(ps.method == "greedy");
}

TEST_CASE("chaining two separated chirps gives two full paths")
{
    AnalysisConfig a;
    const double fs = a.stft.fs;
    const std::vector<SignalBuffer> parts{
        synth_chirp(ChirpSpec::from_frequencies(400.0, 700.0, fs, 16000), 16000, fs),
        synth_chirp(ChirpSpec::from_frequencies(1500.0, 1300.0, fs, 16000), 16000, fs)};
    const Lattice lat = analyze(mix(parts), a);
    const PathSet ps = chain_short_paths(lat, CostFn::prediction_error(double(lat.hop)), 2, 0.1, 3);
    REQUIRE(ps.size() == 2);
    for (const Path& p : ps.paths)
        CHECK(p.nodes.size() == 28);
    CHECK(node_disjoint(ps));
}

TEST_CASE("chaining an empty lattice gives no paths")
{
    Lattice lat;
    const PathSet ps = chain_short_paths(lat, CostFn::prediction_error(512.0), 3, 0.1, 3);
    CHECK(ps.paths.empty());
    Lattice hollow;
    hollow.frames.resize(28);
    hollow.hop = 512;
    CHECK(chain_short_paths(hollow, CostFn::prediction_error(512.0), 3, 0.1, 3).paths.empty());
}

TEST_CASE("chaining rejects spans shorter than two frames")
{
    Lattice lat;
    CHECK_THROWS_AS(chain_short_paths(lat, CostFn::prediction_error(512.0), 1, 0.1, 1), InvalidInput);
}

TEST_CASE("chaining over a table instance keeps tuples disjoint per frame")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sizes = ptrack::testing::random_sizes(rng, 7, 4);
        const auto inst = table_instance(random_transition_costs(FrameLayout(sizes), rng()));
        const PathSet ps = chain_short_paths(inst.lattice, inst.cost_fn(), 2, kInf, 3);
        CHECK(node_disjoint(ps));
        CHECK_NOTHROW(check_structure(ps, inst.lattice.layout()));
    }
}
