#include "polygas/subset_gas.hpp"

#include "polygas/dispatch.hpp"
#include "polygas/errors.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <unordered_map>

namespace polygas {

namespace {

constexpr std::size_t kMaxSubsetPolymers = std::size_t{1} << 20;
constexpr std::size_t kTableCap = 24;
constexpr std::size_t kConvergenceCheckCap = 20;
constexpr std::size_t kExhaustiveSampleCap = 10;
constexpr std::size_t kSampledSubsets = 1000;
constexpr double kFloatRelTol = 1e-9;

std::vector<std::size_t> sorted_members(SiteSet s) { return s.members(); }

bool support_less(SiteSet a, SiteSet b)
{
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    const auto ma = sorted_members(a);
    const auto mb = sorted_members(b);
    return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

void check_activity_size(const SubsetUniverse& u, std::size_t n)
{
    if (n != u.polymer_count()) {
        throw InvalidArgument("activity map has " + std::to_string(n) + " entries for " +
                              std::to_string(u.polymer_count()) + " polymers");
    }
}

/// Aggregated activity per support: identical supports are mutually
/// incompatible and enter Xi only through their sum.
template <class T>
std::unordered_map<std::uint64_t, T> activity_by_support(const SubsetUniverse& u, std::span<const T> z)
{
    std::unordered_map<std::uint64_t, T> out;
    for (std::size_t g = 0; g < u.polymer_count(); ++g) {
        auto [it, fresh] = out.try_emplace(u.support(g).bits(), z[g]);
        if (!fresh) {
            it->second += z[g];
        }
    }
    return out;
}

template <class T>
T by_sites(const SubsetUniverse& u, std::uint64_t region, std::span<const T> z,
           std::unordered_map<std::uint64_t, T>& memo)
{
    if (region == 0) {
        return T(1);
    }
    if (auto it = memo.find(region); it != memo.end()) {
        return it->second;
    }
    const auto x = static_cast<std::size_t>(std::countr_zero(region));
    T total = by_sites(u, region & (region - 1), z, memo);
    for (auto g : u.polymers_containing(x)) {
        const std::uint64_t s = u.support(g).bits();
        if ((s & ~region) == 0 && z[g] != 0) {
            total += z[g] * by_sites(u, region & ~s, z, memo);
        }
    }
    memo.emplace(region, total);
    return total;
}

template <class T>
bool le_with_tolerance(const T& lhs, const T& rhs)
{
    if constexpr (std::is_same_v<T, double>) {
        return lhs <= rhs + kFloatRelTol * std::max(1.0, std::abs(rhs));
    } else {
        return lhs <= rhs;
    }
}

std::string site_list(const SubsetUniverse& u, SiteSet s)
{
    std::string out;
    s.for_each([&](std::size_t x) { out += (out.empty() ? "" : ",") + u.site_ids()[x]; });
    return "{" + out + "}";
}

template <class T>
void require_region_convergence(const SubsetUniverse& u, SiteSet region, std::span<const T> minus_rho)
{
    if (region.size() > kConvergenceCheckCap) {
        if (region_partition_function<T>(u, region, minus_rho) <= 0) {
            throw DivergenceIndicator("Xi(-rho) of the region is not positive");
        }
        return;
    }
    const auto table = region_partition_table<T>(u, region, minus_rho);
    const LocalIndex local(region.members());
    for (std::size_t w = 0; w < table.size(); ++w) {
        if (table[w] <= 0) {
            throw DivergenceIndicator("Xi(-rho) is not positive on the region " +
                                      site_list(u, SiteSet::from_bits(local.to_global(w))));
        }
    }
}

} // namespace

SubsetUniverse SubsetUniverse::build(std::vector<std::string> sites, const std::vector<PolymerSpec>& polymers)
{
    if (sites.size() > kMaxElements) {
        throw ResourceLimit("subset universe limited to 64 sites");
    }
    if (polymers.size() > kMaxSubsetPolymers) {
        throw ResourceLimit("subset universe limited to 2^20 polymers");
    }
    SubsetUniverse u;
    u.site_ids_ = std::move(sites);
    std::unordered_map<std::string, std::size_t> site_index;
    for (std::size_t i = 0; i < u.site_ids_.size(); ++i) {
        if (!site_index.emplace(u.site_ids_[i], i).second) {
            throw InvalidArgument("duplicate site id '" + u.site_ids_[i] + "'");
        }
    }
    std::vector<std::pair<std::string, SiteSet>> entries;
    std::unordered_map<std::string, bool> seen_ids;
    for (const auto& p : polymers) {
        if (!seen_ids.emplace(p.id, true).second) {
            throw InvalidArgument("duplicate polymer id '" + p.id + "'");
        }
        if (p.support.empty()) {
            throw InvalidArgument("polymer '" + p.id + "' has an empty support");
        }
        SiteSet s;
        for (const auto& site : p.support) {
            auto it = site_index.find(site);
            if (it == site_index.end()) {
                throw InvalidArgument("polymer '" + p.id + "' has support site '" + site +
                                      "' outside the ground set");
            }
            s.insert(it->second);
        }
        entries.emplace_back(p.id, s);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return support_less(a.second, b.second); });
    u.containing_.resize(u.site_ids_.size());
    for (std::size_t g = 0; g < entries.size(); ++g) {
        u.polymer_ids_.push_back(entries[g].first);
        u.supports_.push_back(entries[g].second);
        entries[g].second.for_each([&](std::size_t x) { u.containing_[x].push_back(g); });
    }
    if (u.polymer_count() <= kMaxElements) {
        std::vector<std::pair<PolymerIndex, PolymerIndex>> pairs;
        for (std::size_t a = 0; a < u.polymer_count(); ++a) {
            for (std::size_t b = a + 1; b < u.polymer_count(); ++b) {
                if (u.supports_[a].intersects(u.supports_[b])) {
                    pairs.emplace_back(a, b);
                }
            }
        }
        u.abstract_ = PolymerUniverse::from_adjacency(u.polymer_ids_, pairs);
    }
    return u;
}

SubsetUniverse SubsetUniverse::all_subsets(std::vector<std::string> sites, std::size_t max_size)
{
    if (max_size < 1) {
        throw InvalidArgument("subset generator needs k >= 1");
    }
    const std::size_t n = sites.size();
    if (n > kMaxElements) {
        throw ResourceLimit("subset universe limited to 64 sites");
    }
    std::vector<PolymerSpec> polymers;
    std::vector<std::size_t> combo;
    for (std::size_t size = 1; size <= std::min(max_size, n); ++size) {
        combo.resize(size);
        for (std::size_t i = 0; i < size; ++i) {
            combo[i] = i;
        }
        while (true) {
            PolymerSpec p;
            for (auto i : combo) {
                p.id += (p.id.empty() ? "" : "+") + sites[i];
                p.support.push_back(sites[i]);
            }
            polymers.push_back(std::move(p));
            if (polymers.size() > kMaxSubsetPolymers) {
                throw ResourceLimit("subset generator exceeds 2^20 polymers");
            }
            std::size_t i = size;
            while (i > 0 && combo[i - 1] == n - size + i - 1) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++combo[i - 1];
            for (std::size_t j = i; j < size; ++j) {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    return build(std::move(sites), polymers);
}

std::size_t SubsetUniverse::site_index(const std::string& id) const
{
    for (std::size_t i = 0; i < site_ids_.size(); ++i) {
        if (site_ids_[i] == id) {
            return i;
        }
    }
    throw InvalidArgument("unknown site id '" + id + "'");
}

SiteSet SubsetUniverse::sites_of(const std::vector<std::string>& ids) const
{
    SiteSet s;
    for (const auto& id : ids) {
        s.insert(site_index(id));
    }
    return s;
}

std::size_t SubsetUniverse::polymer_index(const std::string& id) const
{
    for (std::size_t i = 0; i < polymer_ids_.size(); ++i) {
        if (polymer_ids_[i] == id) {
            return i;
        }
    }
    throw InvalidArgument("unknown polymer id '" + id + "'");
}

const PolymerUniverse& SubsetUniverse::abstract() const
{
    if (!abstract_) {
        throw ResourceLimit("abstract view needs at most 64 polymers");
    }
    return *abstract_;
}

PolymerSet SubsetUniverse::polymers_within(SiteSet region) const
{
    const auto& a = abstract();
    PolymerSet out;
    for (std::size_t g = 0; g < a.size(); ++g) {
        if (supports_[g].subset_of(region)) {
            out.insert(g);
        }
    }
    return out;
}

void SubsetUniverse::check_region(SiteSet region, const char* what) const
{
    if (!region.subset_of(all_sites())) {
        throw InvalidArgument(std::string(what) + " is not contained in the ground set");
    }
}

template <class T>
T region_partition_function_by_sites(const SubsetUniverse& universe, SiteSet region, std::span<const T> z)
{
    universe.check_region(region, "region");
    check_activity_size(universe, z.size());
    std::unordered_map<std::uint64_t, T> memo;
    return by_sites<T>(universe, region.bits(), z, memo);
}

template <class T>
T region_partition_function(const SubsetUniverse& universe, SiteSet region, std::span<const T> z)
{
    universe.check_region(region, "region");
    check_activity_size(universe, z.size());
    if (universe.has_abstract()) {
        return partition_function<T>(universe.abstract(), universe.polymers_within(region), z);
    }
    return region_partition_function_by_sites<T>(universe, region, z);
}

template <class T>
std::vector<T> region_partition_table(const SubsetUniverse& universe, SiteSet region, std::span<const T> z)
{
    universe.check_region(region, "region");
    check_activity_size(universe, z.size());
    if (region.size() > kTableCap) {
        throw ResourceLimit("region partition table limited to 24 sites");
    }
    const LocalIndex local(region.members());
    std::vector<std::vector<std::pair<std::uint64_t, T>>> terms(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) {
        for (auto g : universe.polymers_containing(local.members()[i])) {
            const SiteSet s = universe.support(g);
            if (s.subset_of(region) && z[g] != 0) {
                terms[i].emplace_back(local.to_local(s.bits()), z[g]);
            }
        }
    }
    std::vector<T> table(local.table_size());
    table[0] = T(1);
    for (std::uint64_t w = 1; w < table.size(); ++w) {
        const auto v = static_cast<std::size_t>(std::countr_zero(w));
        table[w] = table[w & (w - 1)];
        for (const auto& [s, zs] : terms[v]) {
            if ((s & ~w) == 0) {
                table[w] += zs * table[w & ~s];
            }
        }
    }
    return table;
}

template double region_partition_function<double>(const SubsetUniverse&, SiteSet, std::span<const double>);
template Rational region_partition_function<Rational>(const SubsetUniverse&, SiteSet, std::span<const Rational>);
template double region_partition_function_by_sites<double>(const SubsetUniverse&, SiteSet,
                                                           std::span<const double>);
template Rational region_partition_function_by_sites<Rational>(const SubsetUniverse&, SiteSet,
                                                               std::span<const Rational>);
template std::vector<double> region_partition_table<double>(const SubsetUniverse&, SiteSet,
                                                            std::span<const double>);
template std::vector<Rational> region_partition_table<Rational>(const SubsetUniverse&, SiteSet,
                                                                std::span<const Rational>);

GasValue region_partition_function(const SubsetUniverse& universe, SiteSet region, const ActivityMap& activities,
                                   Mode mode)
{
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        return region_partition_function<T>(universe, region, z);
    });
}

GasValue region_reduced_correlation(const SubsetUniverse& universe, SiteSet region, SiteSet removed,
                                    const ActivityMap& activities, Mode mode)
{
    if (!removed.subset_of(region)) {
        throw InvalidArgument("reduced correlation argument is not contained in the region");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const T xi = region_partition_function<T>(universe, region, z);
        if (xi == 0) {
            throw NormalizationFailure("partition function vanishes");
        }
        return T(region_partition_function<T>(universe, region - removed, z) / xi);
    });
}

LogRatio site_theta(const SubsetUniverse& universe, SiteSet region, std::size_t site, const ActivityMap& activities,
                    SeriesMode series, Mode mode)
{
    universe.check_region(region, "region");
    if (!region.contains(site)) {
        throw InvalidArgument("site_theta: site is not in the region");
    }
    const SiteSet smaller = region.without(site);
    GasValue arg = dispatch(mode, [&]<class T>() {
        if (series == SeriesMode::Signed) {
            const auto z = activities.values_as<T>();
            const T full = region_partition_function<T>(universe, region, z);
            const T rest = region_partition_function<T>(universe, smaller, z);
            if (full <= 0 || rest <= 0) {
                throw DivergenceIndicator("partition function is not positive");
            }
            return T(full / rest);
        }
        const auto minus_rho = activities.negated_radii_as<T>();
        require_region_convergence<T>(universe, region, minus_rho);
        return T(region_partition_function<T>(universe, smaller, minus_rho) /
                 region_partition_function<T>(universe, region, minus_rho));
    });
    return LogRatio{std::move(arg)};
}

GasValue site_pi(const SubsetUniverse& universe, SiteSet region, std::size_t site, const ActivityMap& activities,
                 SeriesMode series, Mode mode)
{
    universe.check_region(region, "region");
    if (!region.contains(site)) {
        throw InvalidArgument("site_pi: site is not in the region");
    }
    return dispatch(mode, [&]<class T>() {
        std::vector<T> z;
        if (series == SeriesMode::Signed) {
            z = activities.values_as<T>();
        } else {
            z = activities.negated_radii_as<T>();
            require_region_convergence<T>(universe, region, z);
        }
        const T full = region_partition_function<T>(universe, region, z);
        if (full == 0) {
            throw NormalizationFailure("partition function vanishes");
        }
        return T(region_partition_function<T>(universe, region.without(site), z) / full);
    });
}

GasValue site_addition_residual(const SubsetUniverse& universe, SiteSet base, std::size_t site,
                                const ActivityMap& activities, Mode mode)
{
    universe.check_region(base.with(site), "region");
    if (base.contains(site)) {
        throw InvalidArgument("site addition: the site is already in the region");
    }
    if (base.size() > kTableCap) {
        throw ResourceLimit("site addition check limited to 24 sites");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const auto by_support = activity_by_support<T>(universe, z);
        T residual = region_partition_function<T>(universe, base.with(site), z) -
                     region_partition_function<T>(universe, base, z);
        // Every S inside Y, the empty set included.
        const std::uint64_t y = base.bits();
        for (std::uint64_t s = y;; s = (s - 1) & y) {
            const auto it = by_support.find(s | (std::uint64_t{1} << site));
            if (it != by_support.end() && it->second != 0) {
                residual -= it->second * region_partition_function<T>(universe, base - SiteSet::from_bits(s), z);
            }
            if (s == 0) {
                break;
            }
        }
        return residual;
    });
}

GasValue site_deletion_residual(const SubsetUniverse& universe, SiteSet region, SiteSet removed,
                                const ActivityMap& activities, Mode mode)
{
    universe.check_region(region, "region");
    if (removed.empty() || !removed.subset_of(region)) {
        throw InvalidArgument("site deletion: X must be a nonempty subset of the region");
    }
    const std::size_t pivot = removed.front();
    const SiteSet outside = region - removed;
    if (outside.size() > kTableCap) {
        throw ResourceLimit("site deletion check limited to 24 free sites");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const auto by_support = activity_by_support<T>(universe, z);
        T residual = region_partition_function<T>(universe, outside, z) -
                     region_partition_function<T>(universe, region - removed.without(pivot), z);
        const std::uint64_t free = outside.bits();
        for (std::uint64_t s = free;; s = (s - 1) & free) {
            const auto it = by_support.find(s | (std::uint64_t{1} << pivot));
            if (it != by_support.end() && it->second != 0) {
                residual += it->second * region_partition_function<T>(universe, outside - SiteSet::from_bits(s), z);
            }
            if (s == 0) {
                break;
            }
        }
        return residual;
    });
}

template <class T>
T site_criterion_margin(const SubsetUniverse& universe, std::size_t site, std::span<const T> rho,
                        std::span<const T> site_xi)
{
    T load(0);
    for (auto g : universe.polymers_containing(site)) {
        T weight = rho[g];
        universe.support(g).for_each([&](std::size_t y) { weight *= site_xi[y]; });
        load += weight;
    }
    return T(site_xi[site] - 1 - load);
}

template double site_criterion_margin<double>(const SubsetUniverse&, std::size_t, std::span<const double>,
                                              std::span<const double>);
template Rational site_criterion_margin<Rational>(const SubsetUniverse&, std::size_t, std::span<const Rational>,
                                                  std::span<const Rational>);

namespace {

template <class T>
InductiveBoundReport inductive_report(const SubsetUniverse& u, SiteSet region, const ActivityMap& activities,
                                      const WeightFamily& weights, std::uint64_t seed)
{
    const auto xi = convert_all<T>(weights.site_xi());
    if (xi.size() != u.site_count()) {
        throw InvalidArgument("site weights must list every site of the ground set");
    }
    const auto rho = activities.radii_as<T>();
    InductiveBoundReport report;
    region.for_each([&](std::size_t x) {
        T margin = site_criterion_margin<T>(u, x, rho, xi);
        if (margin < 0) {
            report.failing_sites.push_back(x);
        }
        report.margins.emplace_back(x, GasValue::of(margin));
    });
    report.criterion_holds = report.failing_sites.empty();
    if (!report.criterion_holds) {
        return report;
    }

    const auto minus_rho = activities.negated_radii_as<T>();
    const bool tabulate = region.size() <= kConvergenceCheckCap;
    std::vector<T> table;
    const LocalIndex local(region.members());
    if (tabulate) {
        table = region_partition_table<T>(u, region, minus_rho);
    }
    auto xi_of = [&](SiteSet w) -> T {
        if (tabulate) {
            return table[local.to_local(w.bits())];
        }
        return region_partition_function<T>(u, w, minus_rho);
    };
    const T full = xi_of(region);
    if (full <= 0) {
        throw DivergenceIndicator("Xi(-rho) of the region is not positive");
    }
    auto check = [&](SiteSet removed) {
        T bound(1);
        removed.for_each([&](std::size_t x) { bound *= xi[x]; });
        const T ratio = xi_of(region - removed) / full;
        RatioCheck c{removed, GasValue::of(ratio), GasValue::of(bound), le_with_tolerance(ratio, bound)};
        return c;
    };
    bool ok = true;
    region.for_each([&](std::size_t x) {
        report.single_site.push_back(check(SiteSet::single(x)));
        ok = ok && report.single_site.back().holds;
    });
    report.exhaustive = region.size() <= kExhaustiveSampleCap;
    if (report.exhaustive) {
        const std::uint64_t all = local.table_size();
        for (std::uint64_t s = 1; s < all; ++s) {
            report.telescoped.push_back(check(SiteSet::from_bits(local.to_global(s))));
            ok = ok && report.telescoped.back().holds;
        }
    } else {
        std::mt19937_64 rng(seed);
        const std::uint64_t mask = local.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << local.size()) - 1;
        for (std::size_t i = 0; i < kSampledSubsets; ++i) {
            std::uint64_t s = rng() & mask;
            if (s == 0) {
                s = 1;
            }
            report.telescoped.push_back(check(SiteSet::from_bits(local.to_global(s))));
            ok = ok && report.telescoped.back().holds;
        }
    }
    report.all_verified = ok;
    return report;
}

} // namespace

InductiveBoundReport inductive_bound_report(const SubsetUniverse& universe, SiteSet region,
                                            const ActivityMap& activities, const WeightFamily& site_weights,
                                            Mode mode, std::uint64_t seed)
{
    universe.check_region(region, "region");
    check_activity_size(universe, activities.size());
    if (mode == Mode::Exact) {
        return inductive_report<Rational>(universe, region, activities, site_weights, seed);
    }
    return inductive_report<double>(universe, region, activities, site_weights, seed);
}

std::vector<Rational> criterion_edge_radii(const SubsetUniverse& universe, const WeightFamily& site_weights)
{
    const auto& xi = site_weights.site_xi();
    if (xi.size() != universe.site_count()) {
        throw InvalidArgument("site weights must list every site of the ground set");
    }
    std::vector<Rational> rho;
    for (std::size_t g = 0; g < universe.polymer_count(); ++g) {
        const SiteSet s = universe.support(g);
        const Rational weight = site_weights.site_product(s);
        std::optional<Rational> best;
        s.for_each([&](std::size_t x) {
            const auto share = static_cast<long>(universe.polymers_containing(x).size());
            Rational r = (xi[x] - 1) / (Rational(share) * weight);
            if (!best || r < *best) {
                best = r;
            }
        });
        rho.push_back(*best);
    }
    return rho;
}

} // namespace polygas
