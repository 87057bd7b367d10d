#pragma once

#include "polygas/numeric.hpp"
#include "polygas/universe.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace polygas {

inline constexpr int kDefaultUrsellMaxOrder = 7;
inline constexpr int kDefaultMayerMaxOrder = 8;

/// Sum of (-1)^|E(G)| over the connected spanning subgraphs G of the simple
/// graph on n vertices with adjacency rows `adjacency` (bit j of row i set
/// when i and j are joined; diagonal ignored). Zero for disconnected graphs,
/// one for a single vertex. Runs in O(3^n).
long long connected_subgraph_sum(std::span<const std::uint32_t> adjacency);

/// phi^T(g_1..g_n) for the hard-core gas: the connected-subgraph sum of the
/// tuple's incompatibility graph (repeated polymers are joined, by reflexivity).
Rational ursell_coefficient(const PolymerUniverse& universe, std::span<const PolymerIndex> tuple,
                            int max_order = kDefaultUrsellMaxOrder);

/// Which terms of the Mayer series are kept.
enum class MayerPin {
    None,       ///< log Xi: all tuples, orders 1..N.
    Containing, ///< Theta series: tuples containing the pinned polymer, orders 1..N.
    Prefixed,   ///< Pi series: phi^T(g, g_1..g_n), orders n = 0..N.
};

struct MayerOptions {
    MayerPin pin = MayerPin::None;
    PolymerIndex pinned = 0;
    int max_order = kDefaultMayerMaxOrder;
};

/// Partial sums of the cluster expansion at z = activities.values(): entry k
/// holds the sum of all orders up to the k-th order kept (orders 1..N, or
/// 0..N for the Pi series). Tuples are grouped by multiset, each weighted by
/// prod z^m / m!.
std::vector<GasValue> mayer_partial_sums(const PolymerUniverse& universe, PolymerSet region,
                                         const ActivityMap& activities, int order, Mode mode,
                                         const MayerOptions& options = {});

GasValue mayer_partial_sum(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities,
                           int order, Mode mode, const MayerOptions& options = {});

} // namespace polygas
