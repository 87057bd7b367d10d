#pragma once

#include "polygas/numeric.hpp"
#include "polygas/universe.hpp"

#include <span>
#include <vector>

namespace polygas {

/// How the pinned series Theta and Pi are evaluated: at the activities z
/// themselves, or as the positive-term majorants at the radii, which by the
/// alternating-sign property equal -Theta(-rho) and Pi(-rho).
enum class SeriesMode { Signed, AbsAtRadius };

/// Xi_region(z): sum over pairwise-compatible subfamilies of `region` of the
/// product of activities, empty family included. Branches on the first
/// remaining polymer and drops its neighborhood when it is taken, so only
/// compatible families are visited.
template <class T>
T partition_function(const PolymerUniverse& universe, PolymerSet region, std::span<const T> z);

/// Xi_W(z) for every W inside `region`, indexed by the local mask over the
/// region's members in universe order. Region size is capped at 24.
template <class T>
std::vector<T> partition_table(const PolymerUniverse& universe, PolymerSet region, std::span<const T> z);

GasValue partition_function(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities,
                            Mode mode);

/// Weight of exactly the family `config` being present, normalized by Xi.
GasValue config_probability(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities,
                            PolymerSet config, Mode mode);

/// log Xi / |region|, always a float.
GasValue pressure(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities);

/// Xi_{region \ X} / Xi_region.
GasValue reduced_correlation(const PolymerUniverse& universe, PolymerSet region, PolymerSet family,
                             const ActivityMap& activities, Mode mode);

/// prod z * prod 1{compatible} * Xi_{region \ Gamma(X)} / Xi_region.
GasValue correlation(const PolymerUniverse& universe, PolymerSet region, PolymerSet family,
                     const ActivityMap& activities, Mode mode);

/// A logarithm kept in exact form: the value is log(argument).
struct LogRatio {
    GasValue argument;

    double value() const;
};

/// Theta^region_g. Signed: log(Xi_region(z) / Xi_{region\g}(z)). Abs: |Theta|(rho)
/// = log(Xi_{region\g}(-rho) / Xi_region(-rho)); raises DivergenceIndicator when
/// some Xi_W(-rho), W inside the region, is not positive.
LogRatio theta(const PolymerUniverse& universe, PolymerSet region, PolymerIndex polymer,
               const ActivityMap& activities, SeriesMode series, Mode mode);

/// Pi^region_g = Xi_{region \ Gamma(g)} / Xi_region; g need not lie in the region.
GasValue pi(const PolymerUniverse& universe, PolymerSet region, PolymerIndex polymer, const ActivityMap& activities,
            SeriesMode series, Mode mode);

/// Xi_W(-rho) > 0 for every W inside the region (the region of absolute
/// convergence of the cluster expansion at these radii). Regions above 20
/// polymers only check the region itself.
bool radii_in_convergence_region(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities);

/// Deletes `order` one polymer at a time and multiplies the Theta arguments.
/// Exact: product minus Xi_region (zero). Float: sum of the logs minus log Xi_region.
GasValue telescope_residual(const PolymerUniverse& universe, PolymerSet region, std::span<const PolymerIndex> order,
                            const ActivityMap& activities, Mode mode);

/// Same telescope for a reduced correlation: the product of
/// exp(-Theta^{region \ {g_{i+1}..g_p}}_{g_i}) minus Xi_{region\X}/Xi_region.
GasValue correlation_telescope_residual(const PolymerUniverse& universe, PolymerSet region,
                                        std::span<const PolymerIndex> family_order, const ActivityMap& activities,
                                        Mode mode);

/// Xi_{Z+g0} - Xi_Z - z_g0 Xi_{Z \ Gamma*(g0)}; g0 must not be in Z.
GasValue fundamental_identity_residual(const PolymerUniverse& universe, PolymerSet family, PolymerIndex added,
                                       const ActivityMap& activities, Mode mode);

} // namespace polygas
