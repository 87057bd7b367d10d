#pragma once

#include "polygas/gas_core.hpp"
#include "polygas/numeric.hpp"
#include "polygas/universe.hpp"
#include "polygas/weights.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polygas {

/// Polymers realized as nonempty subsets of a ground set of sites, with
/// incompatibility given by intersection. Sites keep their input order (the
/// "smallest site" pivot order). Polymers are ordered by support size, then
/// lexicographically by site order; distinct ids may share a support.
class SubsetUniverse {
public:
    struct PolymerSpec {
        std::string id;
        std::vector<std::string> support;
    };

    static SubsetUniverse build(std::vector<std::string> sites, const std::vector<PolymerSpec>& polymers);

    /// Every support of size 1..max_size, one polymer each; ids list the sites
    /// joined by '+'.
    static SubsetUniverse all_subsets(std::vector<std::string> sites, std::size_t max_size);

    std::size_t site_count() const { return site_ids_.size(); }
    const std::vector<std::string>& site_ids() const { return site_ids_; }
    std::size_t site_index(const std::string& id) const;
    SiteSet sites_of(const std::vector<std::string>& ids) const;
    SiteSet all_sites() const { return SiteSet::first(site_count()); }

    std::size_t polymer_count() const { return polymer_ids_.size(); }
    const std::vector<std::string>& polymer_ids() const { return polymer_ids_; }
    std::size_t polymer_index(const std::string& id) const;
    SiteSet support(std::size_t polymer) const { return supports_.at(polymer); }
    const std::vector<SiteSet>& supports() const { return supports_; }

    /// Polymers containing the site, in polymer order.
    const std::vector<std::size_t>& polymers_containing(std::size_t site) const { return containing_.at(site); }

    /// The same gas as an abstract polymer universe. Available up to 64 polymers.
    bool has_abstract() const { return abstract_.has_value(); }
    const PolymerUniverse& abstract() const;

    /// Polymers whose support lies inside the region.
    PolymerSet polymers_within(SiteSet region) const;

    void check_region(SiteSet region, const char* what) const;

private:
    std::vector<std::string> site_ids_;
    std::vector<std::string> polymer_ids_;
    std::vector<SiteSet> supports_;
    std::vector<std::vector<std::size_t>> containing_;
    std::optional<PolymerUniverse> abstract_;
};

/// Xi_region(z) over polymers with support inside the region. Uses the
/// abstract enumeration when the universe has one, otherwise the memoized
/// site-addition recursion.
template <class T>
T region_partition_function(const SubsetUniverse& universe, SiteSet region, std::span<const T> z);

/// Xi_W(z) for every site region W inside `region`, indexed by local mask.
/// Capped at 24 sites.
template <class T>
std::vector<T> region_partition_table(const SubsetUniverse& universe, SiteSet region, std::span<const T> z);

/// Site-addition recursion alone, kept as a second route for large universes.
template <class T>
T region_partition_function_by_sites(const SubsetUniverse& universe, SiteSet region, std::span<const T> z);

GasValue region_partition_function(const SubsetUniverse& universe, SiteSet region, const ActivityMap& activities,
                                   Mode mode);

/// Xi_{region \ X} / Xi_region for a site region X.
GasValue region_reduced_correlation(const SubsetUniverse& universe, SiteSet region, SiteSet removed,
                                    const ActivityMap& activities, Mode mode);

/// Theta^region_x = log Xi_region - log Xi_{region\{x}}; removing a site removes
/// every polymer containing it. Abs mode evaluates at -rho and checks that
/// Xi_W(-rho) > 0 on every site region W of the region.
LogRatio site_theta(const SubsetUniverse& universe, SiteSet region, std::size_t site, const ActivityMap& activities,
                    SeriesMode series, Mode mode);

/// Pi^{x} = d log Xi / d z_{x} = Xi_{region\{x}} / Xi_region.
GasValue site_pi(const SubsetUniverse& universe, SiteSet region, std::size_t site, const ActivityMap& activities,
                 SeriesMode series, Mode mode);

/// Xi_{Y+x} - Xi_Y - sum over S inside Y of z_{{x} u S} Xi_{Y\S}.
GasValue site_addition_residual(const SubsetUniverse& universe, SiteSet base, std::size_t site,
                                const ActivityMap& activities, Mode mode);

/// Deletion form with pivot x1 the smallest site of X:
/// Xi_{L\X} - Xi_{L\(X\{x1})} + sum over S inside L\X of z_{{x1} u S} Xi_{L\(X u S)}.
GasValue site_deletion_residual(const SubsetUniverse& universe, SiteSet region, SiteSet removed,
                                const ActivityMap& activities, Mode mode);

struct RatioCheck {
    SiteSet removed;
    GasValue ratio; ///< Xi_{region\S}(-rho) / Xi_region(-rho)
    GasValue bound; ///< xi^S
    bool holds = false;
};

struct InductiveBoundReport {
    /// (site, (xi_x - 1) - sum over g containing x of rho_g xi^g), for the sites of the region.
    std::vector<std::pair<std::size_t, GasValue>> margins;
    bool criterion_holds = false;
    std::vector<std::size_t> failing_sites;
    /// Populated only when the criterion holds.
    std::vector<RatioCheck> single_site;
    std::vector<RatioCheck> telescoped;
    bool exhaustive = false;
    bool all_verified = false;
};

/// Checks the per-site criterion sum_{g containing x} rho_g xi^g <= xi_x - 1
/// and, when it holds, verifies Xi_{L\x}(-rho)/Xi_L(-rho) <= xi_x for every
/// site and Xi_{L\S}(-rho)/Xi_L(-rho) <= xi^S over site sets S (all of them
/// up to 10 sites, otherwise 1000 drawn with `seed`).
InductiveBoundReport inductive_bound_report(const SubsetUniverse& universe, SiteSet region,
                                            const ActivityMap& activities, const WeightFamily& site_weights,
                                            Mode mode, std::uint64_t seed = 0);

/// (xi_x - 1) - sum over g containing x of rho_g xi^g for one site.
template <class T>
T site_criterion_margin(const SubsetUniverse& universe, std::size_t site, std::span<const T> rho,
                        std::span<const T> site_xi);

/// rho_g = min over x in g of (xi_x - 1) / (n_x xi^g), n_x the number of
/// polymers containing x: the largest uniform-share radii satisfying the
/// per-site criterion, saturating it wherever the minimum is attained.
std::vector<Rational> criterion_edge_radii(const SubsetUniverse& universe, const WeightFamily& site_weights);

} // namespace polygas
