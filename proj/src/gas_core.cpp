#include "polygas/gas_core.hpp"

#include "polygas/dispatch.hpp"
#include "polygas/errors.hpp"

#include <cmath>

namespace polygas {

namespace {

constexpr std::size_t kTableCap = 24;
constexpr std::size_t kConvergenceCheckCap = 20;

template <class T>
T independent_sum(const PolymerUniverse& u, std::uint64_t candidates, std::span<const T> z)
{
    if (candidates == 0) {
        return T(1);
    }
    const auto v = static_cast<std::size_t>(std::countr_zero(candidates));
    const std::uint64_t rest = candidates & (candidates - 1);
    T total = independent_sum(u, rest, z);
    if (z[v] != 0) {
        T taken = independent_sum(u, rest & ~u.neighborhood(v).bits(), z);
        total += z[v] * taken;
    }
    return total;
}

void check_activity_size(const PolymerUniverse& u, std::size_t n)
{
    if (n != u.size()) {
        throw InvalidArgument("activity map has " + std::to_string(n) + " entries for " + std::to_string(u.size()) +
                              " polymers");
    }
}

template <class T>
T positive_or_throw(T value, const char* what)
{
    if (value <= 0) {
        throw DivergenceIndicator(std::string(what) + " is not positive");
    }
    return value;
}

template <class T>
void require_convergence(const PolymerUniverse& u, PolymerSet region, std::span<const T> minus_rho)
{
    if (region.size() > kConvergenceCheckCap) {
        positive_or_throw(partition_function<T>(u, region, minus_rho), "Xi(-rho) of the region");
        return;
    }
    const auto table = partition_table<T>(u, region, minus_rho);
    for (std::size_t w = 0; w < table.size(); ++w) {
        if (table[w] <= 0) {
            LocalIndex local(region.members());
            const auto bad = PolymerSet::from_bits(local.to_global(w));
            std::string names;
            bad.for_each([&](std::size_t g) { names += (names.empty() ? "" : ",") + u.id(g); });
            throw DivergenceIndicator("Xi(-rho) is not positive on the subfamily {" + names + "}");
        }
    }
}

} // namespace

template <class T>
T partition_function(const PolymerUniverse& universe, PolymerSet region, std::span<const T> z)
{
    universe.check_subset(region, "region");
    check_activity_size(universe, z.size());
    return independent_sum<T>(universe, region.bits(), z);
}

template <class T>
std::vector<T> partition_table(const PolymerUniverse& universe, PolymerSet region, std::span<const T> z)
{
    universe.check_subset(region, "region");
    check_activity_size(universe, z.size());
    if (region.size() > kTableCap) {
        throw ResourceLimit("partition table limited to regions of 24 polymers");
    }
    const LocalIndex local(region.members());
    std::vector<std::uint64_t> local_nbhd(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) {
        local_nbhd[i] = local.to_local(universe.neighborhood(local.members()[i]).bits());
    }
    std::vector<T> table(local.table_size());
    table[0] = T(1);
    for (std::uint64_t w = 1; w < table.size(); ++w) {
        const auto v = static_cast<std::size_t>(std::countr_zero(w));
        const T& zv = z[local.members()[v]];
        table[w] = table[w & (w - 1)];
        if (zv != 0) {
            table[w] += zv * table[w & ~local_nbhd[v]];
        }
    }
    return table;
}

template double partition_function<double>(const PolymerUniverse&, PolymerSet, std::span<const double>);
template Rational partition_function<Rational>(const PolymerUniverse&, PolymerSet, std::span<const Rational>);
template std::vector<double> partition_table<double>(const PolymerUniverse&, PolymerSet, std::span<const double>);
template std::vector<Rational> partition_table<Rational>(const PolymerUniverse&, PolymerSet,
                                                         std::span<const Rational>);

GasValue partition_function(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities,
                            Mode mode)
{
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        return partition_function<T>(universe, region, z);
    });
}

GasValue config_probability(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities,
                            PolymerSet config, Mode mode)
{
    if (!config.subset_of(region)) {
        throw InvalidArgument("configuration is not contained in the region");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const T xi = partition_function<T>(universe, region, z);
        if (xi == 0) {
            throw NormalizationFailure("partition function vanishes");
        }
        if (!universe.is_compatible_family(config)) {
            return T(0);
        }
        T weight(1);
        config.for_each([&](std::size_t g) { weight *= z[g]; });
        return T(weight / xi);
    });
}

GasValue pressure(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities)
{
    if (region.empty()) {
        throw InvalidArgument("pressure needs a nonempty region");
    }
    const auto z = activities.values_as<double>();
    const double xi = positive_or_throw(partition_function<double>(universe, region, z), "partition function");
    return GasValue(std::log(xi) / static_cast<double>(region.size()));
}

GasValue reduced_correlation(const PolymerUniverse& universe, PolymerSet region, PolymerSet family,
                             const ActivityMap& activities, Mode mode)
{
    if (!family.subset_of(region)) {
        throw InvalidArgument("reduced correlation argument is not contained in the region");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const T xi = partition_function<T>(universe, region, z);
        if (xi == 0) {
            throw NormalizationFailure("partition function vanishes");
        }
        return T(partition_function<T>(universe, region - family, z) / xi);
    });
}

GasValue correlation(const PolymerUniverse& universe, PolymerSet region, PolymerSet family,
                     const ActivityMap& activities, Mode mode)
{
    if (!family.subset_of(region)) {
        throw InvalidArgument("correlation argument is not contained in the region");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const T xi = partition_function<T>(universe, region, z);
        if (xi == 0) {
            throw NormalizationFailure("partition function vanishes");
        }
        if (!universe.is_compatible_family(family)) {
            return T(0);
        }
        T weight(1);
        family.for_each([&](std::size_t g) { weight *= z[g]; });
        const T rest = partition_function<T>(universe, region - universe.neighborhood(family), z);
        return T(weight * rest / xi);
    });
}

double LogRatio::value() const
{
    if (argument.is_exact()) {
        // log p - log q keeps precision for arguments beyond double range.
        const Rational& q = argument.exact();
        if (q <= 0) {
            return std::nan("");
        }
        long exp_num = 0;
        long exp_den = 0;
        const double m_num = mpz_get_d_2exp(&exp_num, q.get_num_mpz_t());
        const double m_den = mpz_get_d_2exp(&exp_den, q.get_den_mpz_t());
        return std::log(m_num) - std::log(m_den) + static_cast<double>(exp_num - exp_den) * std::log(2.0);
    }
    return std::log(argument.approx());
}

LogRatio theta(const PolymerUniverse& universe, PolymerSet region, PolymerIndex polymer,
               const ActivityMap& activities, SeriesMode series, Mode mode)
{
    universe.check_subset(region, "region");
    if (!region.contains(polymer)) {
        throw InvalidArgument("theta: polymer '" + universe.id(polymer) + "' is not in the region");
    }
    const PolymerSet smaller = region.without(polymer);
    GasValue arg = dispatch(mode, [&]<class T>() {
        if (series == SeriesMode::Signed) {
            const auto z = activities.values_as<T>();
            const T full = positive_or_throw(partition_function<T>(universe, region, z), "Xi of the region");
            const T rest = positive_or_throw(partition_function<T>(universe, smaller, z), "Xi of the reduced region");
            return T(full / rest);
        }
        const auto minus_rho = activities.negated_radii_as<T>();
        require_convergence<T>(universe, region, minus_rho);
        const T full = partition_function<T>(universe, region, minus_rho);
        const T rest = partition_function<T>(universe, smaller, minus_rho);
        return T(rest / full);
    });
    return LogRatio{std::move(arg)};
}

GasValue pi(const PolymerUniverse& universe, PolymerSet region, PolymerIndex polymer, const ActivityMap& activities,
            SeriesMode series, Mode mode)
{
    universe.check_subset(region, "region");
    if (polymer >= universe.size()) {
        throw InvalidArgument("pi: polymer index outside the universe");
    }
    const PolymerSet reduced = region - universe.neighborhood(polymer);
    return dispatch(mode, [&]<class T>() {
        std::vector<T> z;
        if (series == SeriesMode::Signed) {
            z = activities.values_as<T>();
        } else {
            z = activities.negated_radii_as<T>();
            require_convergence<T>(universe, region, z);
        }
        const T full = partition_function<T>(universe, region, z);
        if (full == 0) {
            throw NormalizationFailure("partition function vanishes");
        }
        return T(partition_function<T>(universe, reduced, z) / full);
    });
}

bool radii_in_convergence_region(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities)
{
    try {
        const auto minus_rho = activities.negated_radii_as<Rational>();
        require_convergence<Rational>(universe, region, minus_rho);
        return true;
    } catch (const DivergenceIndicator&) {
        return false;
    }
}

GasValue telescope_residual(const PolymerUniverse& universe, PolymerSet region, std::span<const PolymerIndex> order,
                            const ActivityMap& activities, Mode mode)
{
    PolymerSet seen;
    for (auto g : order) {
        if (!region.contains(g) || seen.contains(g)) {
            throw InvalidArgument("telescope order must list every polymer of the region once");
        }
        seen.insert(g);
    }
    if (seen != region) {
        throw InvalidArgument("telescope order must list every polymer of the region once");
    }
    PolymerSet current = region;
    if (mode == Mode::Exact) {
        Rational product(1);
        for (auto g : order) {
            product *= theta(universe, current, g, activities, SeriesMode::Signed, Mode::Exact).argument.exact();
            current.erase(g);
        }
        const Rational xi = partition_function(universe, region, activities, Mode::Exact).exact();
        return GasValue(Rational(product - xi));
    }
    double sum = 0.0;
    for (auto g : order) {
        sum += theta(universe, current, g, activities, SeriesMode::Signed, Mode::Float).value();
        current.erase(g);
    }
    const auto z = activities.values_as<double>();
    return GasValue(sum - std::log(partition_function<double>(universe, region, z)));
}

GasValue correlation_telescope_residual(const PolymerUniverse& universe, PolymerSet region,
                                        std::span<const PolymerIndex> family_order, const ActivityMap& activities,
                                        Mode mode)
{
    PolymerSet family;
    for (auto g : family_order) {
        if (!region.contains(g) || family.contains(g)) {
            throw InvalidArgument("family order must list distinct polymers of the region");
        }
        family.insert(g);
    }
    // Step i works in region \ {g_{i+1}, ..., g_p}.
    PolymerSet later = family;
    Rational product(1);
    double log_sum = 0.0;
    for (auto g : family_order) {
        later.erase(g);
        const PolymerSet window = region - later;
        const LogRatio t = theta(universe, window, g, activities, SeriesMode::Signed, mode);
        if (mode == Mode::Exact) {
            product /= t.argument.exact();
        } else {
            log_sum += t.value();
        }
    }
    const GasValue direct = reduced_correlation(universe, region, family, activities, mode);
    if (mode == Mode::Exact) {
        return GasValue(Rational(product - direct.exact()));
    }
    return GasValue(std::exp(-log_sum) - direct.approx());
}

GasValue fundamental_identity_residual(const PolymerUniverse& universe, PolymerSet family, PolymerIndex added,
                                       const ActivityMap& activities, Mode mode)
{
    universe.check_subset(family, "family");
    if (family.contains(added)) {
        throw InvalidArgument("fundamental identity: added polymer already in the family");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const T grown = partition_function<T>(universe, family.with(added), z);
        const T base = partition_function<T>(universe, family, z);
        const T pruned = partition_function<T>(universe, family - universe.punctured_neighborhood(added), z);
        return T(grown - base - z[added] * pruned);
    });
}

} // namespace polygas
