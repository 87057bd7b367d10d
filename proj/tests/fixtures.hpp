#pragma once

#include "oracles.hpp"

#include "polygas/subset_gas.hpp"
#include "polygas/universe.hpp"

#include <string>
#include <vector>

namespace fixture {

using polygas::Rational;

/// Signed evaluation point z with radii |z|.
inline polygas::ActivityMap at(const std::vector<Rational>& z)
{
    std::vector<Rational> rho;
    for (const auto& x : z) {
        rho.push_back(abs(x));
    }
    return polygas::ActivityMap(z, rho);
}

inline std::vector<std::string> ids(const std::string& prefix, std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

inline polygas::PolymerUniverse universe(const oracle::Adjacency& adj)
{
    return polygas::PolymerUniverse::from_adjacency(ids("g", adj.size()), oracle::pairs_of(adj));
}

inline polygas::PolymerUniverse path(std::size_t n)
{
    oracle::Adjacency adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        adj[i][i + 1] = adj[i + 1][i] = true;
    }
    return universe(adj);
}

inline polygas::PolymerUniverse cycle(std::size_t n)
{
    oracle::Adjacency adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        adj[i][(i + 1) % n] = adj[(i + 1) % n][i] = true;
    }
    return universe(adj);
}

inline polygas::PolymerUniverse complete(std::size_t n)
{
    oracle::Adjacency adj(n, std::vector<bool>(n, true));
    for (std::size_t i = 0; i < n; ++i) {
        adj[i][i] = false;
    }
    return universe(adj);
}

/// A subset universe built from raw support masks, with the activities
/// (given in mask order) carried over to the universe's canonical order.
struct SubsetCase {
    polygas::SubsetUniverse universe;
    std::vector<std::uint64_t> supports; // in universe polymer order, over universe sites
    std::vector<Rational> z;             // in universe polymer order
};

inline SubsetCase subset_case(std::size_t sites, const std::vector<std::uint64_t>& masks, const std::vector<Rational>& z)
{
    std::vector<polygas::SubsetUniverse::PolymerSpec> specs;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        polygas::SubsetUniverse::PolymerSpec p;
        p.id = "g" + std::to_string(i);
        for (std::size_t s = 0; s < sites; ++s) {
            if ((masks[i] >> s) & 1u) {
                p.support.push_back("s" + std::to_string(s));
            }
        }
        specs.push_back(std::move(p));
    }
    SubsetCase c{polygas::SubsetUniverse::build(ids("s", sites), specs), {}, {}};
    c.supports.resize(masks.size());
    c.z.resize(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const auto k = c.universe.polymer_index("g" + std::to_string(i));
        c.supports[k] = masks[i];
        c.z[k] = z[i];
    }
    return c;
}

} // namespace fixture
