#include "fixtures.hpp"
#include "oracles.hpp"

#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"
#include "polygas/ursell.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace polygas;
using oracle::q;

TEST_CASE("connected subgraph sums on small graphs")
{
    const std::uint32_t single[] = {0};
    CHECK(connected_subgraph_sum(single) == 1);
    const std::uint32_t edge[] = {0b10, 0b01};
    CHECK(connected_subgraph_sum(edge) == -1);
    const std::uint32_t apart[] = {0, 0};
    CHECK(connected_subgraph_sum(apart) == 0);
    const std::uint32_t triangle[] = {0b110, 0b101, 0b011};
    CHECK(connected_subgraph_sum(triangle) == 2);
}

TEST_CASE("ursell coefficients of named tuples")
{
    const auto tri = fixture::complete(3);
    const PolymerIndex one[] = {0};
    CHECK(ursell_coefficient(tri, one) == 1);
    const PolymerIndex pair[] = {0, 1};
    CHECK(ursell_coefficient(tri, pair) == -1);
    const PolymerIndex three[] = {0, 1, 2};
    CHECK(ursell_coefficient(tri, three) == 2);

    const auto free = PolymerUniverse::build({"a", "b"}, {});
    const PolymerIndex apart[] = {0, 1};
    CHECK(ursell_coefficient(free, apart) == 0);

    // n-fold repetition: complete graph, (n-1)! (-1)^(n-1).
    const PolymerIndex rep[] = {0, 0, 0, 0, 0};
    CHECK(ursell_coefficient(free, rep) == 24);

    const PolymerIndex long_tuple[] = {0, 0, 0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(ursell_coefficient(free, long_tuple), ResourceLimit);
}

TEST_CASE("ursell coefficients match the edge-subset oracle and alternate in sign")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto adj = oracle::random_graph(rng, n, 0.5);
        const auto u = fixture::universe(adj);
        std::uniform_int_distribution<std::size_t> len(1, 6);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> tuple(len(rng));
        for (auto& t : tuple) {
            t = pick(rng);
        }
        const auto edges = oracle::tuple_edges(adj, tuple);
        const long long want = oracle::connected_edge_sum(tuple.size(), edges);
        const Rational got = ursell_coefficient(u, tuple);
        CHECK(got == Rational(static_cast<long>(want)));
        const int expected_sign = tuple.size() % 2 == 1 ? 1 : -1;
        CHECK((got == 0 || sgn(got) == expected_sign));
    }
}

TEST_CASE("mayer series of one polymer is the logarithm")
{
    const auto one = PolymerUniverse::build({"g"}, {});
    const auto z = q(1, 4);
    const auto sums = mayer_partial_sums(one, one.all(), ActivityMap::uniform(1, z, z), 3, Mode::Exact);
    REQUIRE(sums.size() == 3);
    CHECK(sums[0].exact() == z);
    CHECK(sums[1].exact() == z - z * z / 2);
    CHECK(sums[2].exact() == z - z * z / 2 + z * z * z / 3);

    const auto zero = mayer_partial_sum(one, one.all(), ActivityMap::uniform(1, 0, 0), 5, Mode::Exact);
    CHECK(zero.is_zero());
}

TEST_CASE("mayer series factorizes over compatible polymers")
{
    const auto free = PolymerUniverse::build({"a", "b"}, {});
    const auto za = q(1, 5);
    const auto zb = q(-1, 3);
    const ActivityMap act({za, zb}, {za, -zb});
    auto log_part = [](const Rational& z, int order) {
        Rational s = 0;
        Rational p = 1;
        for (int k = 1; k <= order; ++k) {
            p *= z;
            s += (k % 2 == 1 ? 1 : -1) * p / k;
        }
        return s;
    };
    const auto sums = mayer_partial_sums(free, free.all(), act, 5, Mode::Exact);
    for (int k = 1; k <= 5; ++k) {
        CHECK(sums[static_cast<std::size_t>(k - 1)].exact() == log_part(za, k) + log_part(zb, k));
    }
}

TEST_CASE("mayer series reproduces log Xi on small universes")
{
    // Taylor data: the truncation error is of order z^(N+1).
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto adj = oracle::random_graph(rng, n, 0.6);
        const auto u = fixture::universe(adj);
        const auto z = oracle::random_activities(rng, n, -2, 2, 100);
        const auto act = fixture::at(z);
        const double log_xi = std::log(oracle::independence_polynomial(adj, u.all().bits(), z).get_d());
        const auto partial = mayer_partial_sum(u, u.all(), act, 7, Mode::Exact);
        CHECK(std::abs(partial.approx() - log_xi) < 1e-10);

        // Pinned series: Theta and Pi of polymer 0.
        MayerOptions containing{MayerPin::Containing, 0, 8};
        const auto th = mayer_partial_sum(u, u.all(), act, 7, Mode::Exact, containing);
        CHECK(std::abs(th.approx() - theta(u, u.all(), 0, act, SeriesMode::Signed, Mode::Exact).value()) < 1e-10);
        MayerOptions prefixed{MayerPin::Prefixed, 0, 8};
        const auto pser = mayer_partial_sum(u, u.all(), act, 6, Mode::Exact, prefixed);
        CHECK(std::abs(pser.approx() - pi(u, u.all(), 0, act, SeriesMode::Signed, Mode::Exact).approx()) < 1e-9);
    }
}

TEST_CASE("pi series of one polymer resums to 1/(1+z)")
{
    const auto one = PolymerUniverse::build({"g"}, {});
    const auto z = q(1, 10);
    MayerOptions prefixed{MayerPin::Prefixed, 0, 8};
    const auto sums = mayer_partial_sums(one, one.all(), ActivityMap::uniform(1, z, z), 2, Mode::Exact, prefixed);
    REQUIRE(sums.size() == 3);
    CHECK(sums[0].exact() == 1);
    CHECK(sums[1].exact() == 1 - z);
    CHECK(sums[2].exact() == 1 - z + z * z);
}

TEST_CASE("mayer error shrinks once the extended criterion holds with room")
{
    // Path of 3 at z = 1/10: far inside the convergence region.
    const auto p3 = fixture::path(3);
    const ActivityMap act = ActivityMap::uniform(3, q(1, 10), q(1, 10));
    const double log_xi = std::log(partition_function(p3, p3.all(), act, Mode::Exact).approx());
    const auto sums = mayer_partial_sums(p3, p3.all(), act, 8, Mode::Exact);
    double previous = std::abs(sums[1].approx() - log_xi);
    for (std::size_t k = 2; k < sums.size(); ++k) {
        const double err = std::abs(sums[k].approx() - log_xi);
        CHECK(err <= previous);
        previous = err;
    }
    // Nearest zero of 1 + 3z + z^2 is at |z| = 0.38, so the tail is of order 0.26^9.
    CHECK(previous < 1e-6);
}
