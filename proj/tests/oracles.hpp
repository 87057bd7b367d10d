#pragma once

// Brute-force reference computations used by the unit and acceptance tests.
// They share nothing with the library's enumeration code beyond the Rational
// type: plain adjacency matrices, full subset scans, explicit edge sets.

#include <gmpxx.h>

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Q = mpq_class;
using Adjacency = std::vector<std::vector<bool>>;

inline Q q(long num, long den = 1)
{
    Q r(num, den);
    r.canonicalize();
    return r;
}

/// Sum over all subsets of `region` with no adjacent pair (adjacency assumed
/// reflexive off the diagonal only through the pair list) of the product of z.
inline Q independence_polynomial(const Adjacency& adj, std::uint64_t region, const std::vector<Q>& z)
{
    const std::size_t n = adj.size();
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
        if ((region >> i) & 1u) {
            members.push_back(i);
        }
    }
    Q total = 0;
    const std::uint64_t count = std::uint64_t{1} << members.size();
    for (std::uint64_t s = 0; s < count; ++s) {
        bool ok = true;
        Q term = 1;
        for (std::size_t a = 0; a < members.size() && ok; ++a) {
            if (!((s >> a) & 1u)) {
                continue;
            }
            term *= z[members[a]];
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (((s >> b) & 1u) && adj[members[a]][members[b]]) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            total += term;
        }
    }
    return total;
}

/// Xi of a subset gas: families of polymers with supports inside `region`
/// and pairwise disjoint supports.
inline Q subset_partition(const std::vector<std::uint64_t>& supports, std::uint64_t region, const std::vector<Q>& z)
{
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < supports.size(); ++i) {
        if ((supports[i] & ~region) == 0) {
            inside.push_back(i);
        }
    }
    Q total = 0;
    const std::uint64_t count = std::uint64_t{1} << inside.size();
    for (std::uint64_t s = 0; s < count; ++s) {
        std::uint64_t used = 0;
        bool ok = true;
        Q term = 1;
        for (std::size_t a = 0; a < inside.size(); ++a) {
            if (!((s >> a) & 1u)) {
                continue;
            }
            const auto sup = supports[inside[a]];
            if (used & sup) {
                ok = false;
                break;
            }
            used |= sup;
            term *= z[inside[a]];
        }
        if (ok) {
            total += term;
        }
    }
    return total;
}

/// Sum of (-1)^|E| over edge subsets E of the graph (given by its edge list
/// on n vertices) whose spanning subgraph is connected.
inline long long connected_edge_sum(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    long long total = 0;
    const std::uint64_t count = std::uint64_t{1} << edges.size();
    for (std::uint64_t s = 0; s < count; ++s) {
        // union-find
        std::vector<std::size_t> parent(n);
        for (std::size_t i = 0; i < n; ++i) {
            parent[i] = i;
        }
        auto find = [&](std::size_t x) {
            while (parent[x] != x) {
                x = parent[x] = parent[parent[x]];
            }
            return x;
        };
        std::size_t components = n;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if ((s >> e) & 1u) {
                auto a = find(edges[e].first);
                auto b = find(edges[e].second);
                if (a != b) {
                    parent[a] = b;
                    --components;
                }
            }
        }
        if (components == 1) {
            total += (std::popcount(s) % 2 == 0) ? 1 : -1;
        }
    }
    return total;
}

/// Incompatibility graph of a tuple: positions i, j joined when the polymers
/// are incompatible (always when they repeat).
inline std::vector<std::pair<std::size_t, std::size_t>> tuple_edges(const Adjacency& adj,
                                                                   const std::vector<std::size_t>& tuple)
{
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        for (std::size_t j = i + 1; j < tuple.size(); ++j) {
            if (tuple[i] == tuple[j] || adj[tuple[i]][tuple[j]]) {
                edges.emplace_back(i, j);
            }
        }
    }
    return edges;
}

/// Random symmetric adjacency without diagonal, edge probability p.
inline Adjacency random_graph(std::mt19937_64& rng, std::size_t n, double p)
{
    std::bernoulli_distribution coin(p);
    Adjacency adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coin(rng)) {
                adj[i][j] = adj[j][i] = true;
            }
        }
    }
    return adj;
}

inline std::vector<std::pair<std::size_t, std::size_t>> pairs_of(const Adjacency& adj)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (std::size_t j = i + 1; j < adj.size(); ++j) {
            if (adj[i][j]) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

/// Rational in [lo, hi] with denominator `den`.
inline Q random_rational(std::mt19937_64& rng, long lo_num, long hi_num, long den)
{
    std::uniform_int_distribution<long> d(lo_num, hi_num);
    return q(d(rng), den);
}

inline std::vector<Q> random_activities(std::mt19937_64& rng, std::size_t n, long lo_num, long hi_num, long den)
{
    std::vector<Q> z;
    for (std::size_t i = 0; i < n; ++i) {
        z.push_back(random_rational(rng, lo_num, hi_num, den));
    }
    return z;
}

/// Random distinct nonempty supports over `sites` sites.
inline std::vector<std::uint64_t> random_supports(std::mt19937_64& rng, std::size_t sites, std::size_t count,
                                                  std::size_t max_size)
{
    std::vector<std::uint64_t> out;
    std::uniform_int_distribution<std::size_t> site(0, sites - 1);
    std::uniform_int_distribution<std::size_t> size(1, max_size);
    std::size_t guard = 0;
    while (out.size() < count && guard++ < 10000) {
        std::uint64_t s = 0;
        const auto k = size(rng);
        for (std::size_t i = 0; i < k; ++i) {
            s |= std::uint64_t{1} << site(rng);
        }
        bool fresh = true;
        for (auto t : out) {
            fresh = fresh && t != s;
        }
        if (fresh) {
            out.push_back(s);
        }
    }
    return out;
}

} // namespace oracle
