#include "polygas/ks_engine.hpp"

#include "polygas/dispatch.hpp"
#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace polygas {

namespace {

constexpr std::size_t kTrackAllCap = 10;
constexpr double kFloatRelTol = 1e-9;

template <class T>
bool le(const T& lhs, const T& rhs)
{
    if constexpr (std::is_same_v<T, double>) {
        return lhs <= rhs + kFloatRelTol * std::max(1.0, std::abs(rhs));
    } else {
        return lhs <= rhs;
    }
}

void check_domain(std::size_t elements)
{
    if (elements > kMaxKsElements) {
        throw ResourceLimit("KS domain limited to 2^16 arguments (16 region elements)");
    }
}

template <class T>
std::vector<T> term_coefficients(const KsSystem& system, std::size_t pivot, std::span<const T> z)
{
    std::vector<T> out;
    for (const auto& t : system.terms(pivot)) {
        T c(0);
        for (auto g : t.polymers) {
            c += z[g];
        }
        out.push_back(c);
    }
    return out;
}

/// f(X minus pivot) for |X| >= 2 plus sign * sum_t c_t f(X u e_t).
template <class T>
RegionFunction<T> apply_terms(const KsSystem& system, const RegionFunction<T>& f, std::span<const T> z, bool plus,
                              bool with_alpha)
{
    if (f.elements() != system.elements()) {
        throw InvalidArgument("region function does not match the KS region");
    }
    std::vector<std::vector<T>> coeff;
    for (std::size_t p = 0; p < system.elements(); ++p) {
        coeff.push_back(term_coefficients<T>(system, p, z));
    }
    RegionFunction<T> out(system.elements());
    for (std::uint64_t x = 1; x < system.table_size(); ++x) {
        const auto p = static_cast<std::size_t>(std::countr_zero(x));
        const std::uint64_t rest = x & (x - 1);
        T v = rest != 0 ? f[rest] : T(with_alpha ? 1 : 0);
        const auto& terms = system.terms(p);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (terms[t].disjoint && (terms[t].extend & x) != 0) {
                continue;
            }
            if (coeff[p][t] == 0) {
                continue;
            }
            if (plus) {
                v += coeff[p][t] * f[x | terms[t].extend];
            } else {
                v -= coeff[p][t] * f[x | terms[t].extend];
            }
        }
        out[x] = v;
    }
    return out;
}

template <class T>
std::vector<T> region_table(const KsSystem& system, std::span<const T> z)
{
    if (system.kind() == KsKind::Subset) {
        return region_partition_table<T>(*system.subset_universe(), SiteSet::from_bits(system.region_bits()), z);
    }
    return partition_table<T>(*system.abstract_universe(), PolymerSet::from_bits(system.region_bits()), z);
}

template <class T>
std::vector<T> element_xi(const KsSystem& system, const WeightFamily& weights)
{
    if (system.kind() == KsKind::Subset) {
        return convert_all<T>(weights.site_xi());
    }
    return convert_all<T>(weights.polymer_xi());
}

} // namespace

KsSystem KsSystem::subset(const SubsetUniverse& universe, SiteSet region)
{
    universe.check_region(region, "KS region");
    check_domain(region.size());
    KsSystem sys;
    sys.kind_ = KsKind::Subset;
    sys.region_ = region.bits();
    sys.members_ = region.members();
    sys.subset_ = &universe;
    for (auto x : sys.members_) {
        std::map<std::uint64_t, Term> by_support;
        for (auto g : universe.polymers_containing(x)) {
            const SiteSet s = universe.support(g);
            if (!s.subset_of(region)) {
                continue;
            }
            Term& t = by_support[s.bits()];
            t.extend = sys.to_local(s.without(x).bits());
            t.disjoint = true;
            t.polymers.push_back(g);
        }
        std::vector<Term> terms;
        for (auto& [bits, t] : by_support) {
            terms.push_back(std::move(t));
        }
        sys.terms_.push_back(std::move(terms));
    }
    return sys;
}

KsSystem KsSystem::abstract(const PolymerUniverse& universe, PolymerSet region)
{
    universe.check_subset(region, "KS region");
    check_domain(region.size());
    KsSystem sys;
    sys.kind_ = KsKind::Abstract;
    sys.region_ = region.bits();
    sys.members_ = region.members();
    sys.abstract_ = &universe;
    for (auto g : sys.members_) {
        Term t;
        t.extend = sys.to_local((universe.punctured_neighborhood(g) & region).bits());
        t.polymers.push_back(g);
        sys.terms_.push_back({t});
    }
    return sys;
}

std::uint64_t KsSystem::to_local(std::uint64_t global) const
{
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (global & (std::uint64_t{1} << members_[i])) {
            out |= std::uint64_t{1} << i;
        }
    }
    return out;
}

std::uint64_t KsSystem::to_global(std::uint64_t local) const
{
    std::uint64_t out = 0;
    for (auto b = local; b != 0; b &= b - 1) {
        out |= std::uint64_t{1} << members_[static_cast<std::size_t>(std::countr_zero(b))];
    }
    return out;
}

std::string KsSystem::element_id(std::size_t local) const
{
    const auto g = members_.at(local);
    return kind_ == KsKind::Subset ? subset_->site_ids()[g] : abstract_->id(g);
}

std::string KsSystem::describe(std::uint64_t local) const
{
    std::string out;
    for (auto b = local; b != 0; b &= b - 1) {
        out += (out.empty() ? "" : ",") + element_id(static_cast<std::size_t>(std::countr_zero(b)));
    }
    return "{" + out + "}";
}

template <class T>
RegionFunction<T> ks_apply(const KsSystem& system, const RegionFunction<T>& f, std::span<const T> z)
{
    return apply_terms<T>(system, f, z, false, false);
}

template <class T>
RegionFunction<T> ks_alpha(const KsSystem& system)
{
    RegionFunction<T> a(system.elements());
    for (std::size_t i = 0; i < system.elements(); ++i) {
        a[std::uint64_t{1} << i] = T(1);
    }
    return a;
}

template <class T>
RegionFunction<T> t_apply(const KsSystem& system, const RegionFunction<T>& f, std::span<const T> rho)
{
    return apply_terms<T>(system, f, rho, true, true);
}

template <class T>
RegionFunction<T> factorized_function(const KsSystem& system, std::span<const T> xi)
{
    RegionFunction<T> f(system.elements());
    for (std::uint64_t x = 1; x < system.table_size(); ++x) {
        const auto i = static_cast<std::size_t>(std::countr_zero(x));
        const T prev = (x & (x - 1)) != 0 ? f[x & (x - 1)] : T(1);
        f[x] = prev * xi[system.members()[i]];
    }
    return f;
}

template <class T>
RegionFunction<T> partition_candidate(const KsSystem& system, std::span<const T> w)
{
    const auto table = region_table<T>(system, w);
    RegionFunction<T> f(system.elements());
    for (std::uint64_t x = 1; x < system.table_size(); ++x) {
        f[x] = table[x];
    }
    return f;
}

template <class T>
RegionFunction<T> exact_ratios(const KsSystem& system, std::span<const T> z)
{
    const auto table = region_table<T>(system, z);
    const std::uint64_t full = system.table_size() - 1;
    if (table[full] == 0) {
        throw NormalizationFailure("partition function of the KS region vanishes");
    }
    RegionFunction<T> f(system.elements());
    for (std::uint64_t x = 1; x <= full; ++x) {
        f[x] = table[full ^ x] / table[full];
    }
    return f;
}

template <class T>
std::vector<std::vector<T>> neumann_partials(const KsSystem& system, std::span<const T> rho, int max_k,
                                             std::span<const std::uint64_t> tracked)
{
    if (max_k < 0) {
        throw InvalidArgument("Neumann order must be nonnegative");
    }
    for (auto x : tracked) {
        if (x == 0 || x >= system.table_size()) {
            throw InvalidArgument("tracked argument must be a nonempty subset of the region");
        }
    }
    RegionFunction<T> term = ks_alpha<T>(system);
    RegionFunction<T> partial = term;
    std::vector<std::vector<T>> out;
    for (int k = 0;; ++k) {
        std::vector<T> row;
        for (auto x : tracked) {
            row.push_back(partial[x]);
        }
        out.push_back(std::move(row));
        if (k == max_k) {
            break;
        }
        term = apply_terms<T>(system, term, rho, true, false);
        for (std::uint64_t x = 1; x < system.table_size(); ++x) {
            partial[x] += term[x];
        }
    }
    return out;
}

#define POLYGAS_KS_INSTANTIATE(T)                                                                                  \
    template RegionFunction<T> ks_apply<T>(const KsSystem&, const RegionFunction<T>&, std::span<const T>);       \
    template RegionFunction<T> ks_alpha<T>(const KsSystem&);                                                     \
    template RegionFunction<T> t_apply<T>(const KsSystem&, const RegionFunction<T>&, std::span<const T>);        \
    template RegionFunction<T> factorized_function<T>(const KsSystem&, std::span<const T>);                      \
    template RegionFunction<T> partition_candidate<T>(const KsSystem&, std::span<const T>);                      \
    template RegionFunction<T> exact_ratios<T>(const KsSystem&, std::span<const T>);                             \
    template std::vector<std::vector<T>> neumann_partials<T>(const KsSystem&, std::span<const T>, int,           \
                                                             std::span<const std::uint64_t>);

POLYGAS_KS_INSTANTIATE(double)
POLYGAS_KS_INSTANTIATE(Rational)

std::vector<std::pair<std::string, GasValue>> ks_precheck(const KsSystem& system, const ActivityMap& activities,
                                                          const WeightFamily& weights, Mode mode)
{
    std::vector<std::pair<std::string, GasValue>> out;
    for (std::size_t i = 0; i < system.elements(); ++i) {
        const auto e = system.members()[i];
        GasValue margin = dispatch(mode, [&]<class T>() {
            const auto rho = activities.radii_as<T>();
            const auto xi = element_xi<T>(system, weights);
            if (system.kind() == KsKind::Subset) {
                return site_criterion_margin<T>(*system.subset_universe(), e, rho, xi);
            }
            T prod(1);
            system.abstract_universe()->neighborhood(e).for_each([&](std::size_t h) { prod *= xi[h]; });
            return T(xi[e] - 1 - rho[e] * prod);
        });
        out.emplace_back(system.element_id(i), std::move(margin));
    }
    return out;
}

namespace {

template <class T>
KsTrace iterate(const KsSystem& system, const ActivityMap& activities, const WeightFamily& weights, int steps,
                const std::vector<std::uint64_t>& tracked)
{
    KsTrace trace;
    const auto rho = activities.radii_as<T>();
    const auto xi = element_xi<T>(system, weights);
    const auto exact = exact_ratios<T>(system, activities.negated_radii_as<T>());
    RegionFunction<T> f = factorized_function<T>(system, xi);
    trace.start_ok = trace.monotone = trace.dominated = true;
    auto record = [&](int k) {
        for (auto x : tracked) {
            trace.rows.push_back({k, x, system.describe(x), GasValue::of(f[x]), GasValue::of(exact[x])});
        }
        for (std::uint64_t x = 1; x < system.table_size(); ++x) {
            trace.dominated = trace.dominated && le<T>(exact[x], f[x]);
        }
    };
    record(0);
    for (int k = 1; k <= steps; ++k) {
        RegionFunction<T> next = t_apply<T>(system, f, rho);
        for (std::uint64_t x = 1; x < system.table_size(); ++x) {
            const bool down = le<T>(next[x], f[x]);
            trace.monotone = trace.monotone && down;
            if (k == 1) {
                trace.start_ok = trace.start_ok && down;
            }
        }
        f = std::move(next);
        record(k);
    }
    return trace;
}

} // namespace

KsTrace t_iterate(const KsSystem& system, const ActivityMap& activities, const WeightFamily& weights, int steps,
                  std::vector<std::uint64_t> tracked, Mode mode)
{
    if (steps < 0) {
        throw InvalidArgument("KS steps must be nonnegative");
    }
    auto precheck = ks_precheck(system, activities, weights, mode);
    for (const auto& [element, margin] : precheck) {
        const bool negative = margin.is_exact() ? sgn(margin.exact()) < 0 : margin.approx() < 0;
        if (negative) {
            throw PrecheckFailure(element, "factorized start condition fails at '" + element +
                                               "' (margin " + margin.str() + ")");
        }
    }
    if (tracked.empty()) {
        if (system.elements() <= kTrackAllCap) {
            for (std::uint64_t x = 1; x < system.table_size(); ++x) {
                tracked.push_back(x);
            }
        } else {
            for (std::size_t i = 0; i < system.elements(); ++i) {
                tracked.push_back(std::uint64_t{1} << i);
            }
        }
    }
    for (auto x : tracked) {
        if (x == 0 || x >= system.table_size()) {
            throw InvalidArgument("tracked argument must be a nonempty subset of the region");
        }
    }
    KsTrace trace = mode == Mode::Exact ? iterate<Rational>(system, activities, weights, steps, tracked)
                                        : iterate<double>(system, activities, weights, steps, tracked);
    trace.precheck = std::move(precheck);
    return trace;
}

namespace {

NormBound make_norm(GasValue norm)
{
    NormBound out{norm};
    out.contraction = norm.is_exact() ? norm.exact() < 1 : norm.approx() < 1;
    if (out.contraction) {
        out.solution_bound = norm.is_exact() ? GasValue(Rational(1 / (1 - norm.exact())))
                                             : GasValue(1.0 / (1.0 - norm.approx()));
    }
    return out;
}

} // namespace

NormBound ks_norm_bound(const SubsetUniverse& universe, const ActivityMap& activities,
                        const WeightFamily& site_weights, Mode mode)
{
    if (site_weights.site_xi().size() != universe.site_count()) {
        throw InvalidArgument("site weights must list every site");
    }
    return make_norm(dispatch(mode, [&]<class T>() {
        const auto rho = activities.radii_as<T>();
        const auto xi = convert_all<T>(site_weights.site_xi());
        T inv(0);
        T load(0);
        for (std::size_t x = 0; x < universe.site_count(); ++x) {
            if (!(xi[x] > 0)) {
                throw InvalidArgument("norm weights must be positive");
            }
            inv = std::max<T>(inv, T(1 / xi[x]));
            T sum(0);
            for (auto g : universe.polymers_containing(x)) {
                T w = rho[g];
                universe.support(g).for_each([&](std::size_t y) { w *= xi[y]; });
                sum += w;
            }
            load = std::max<T>(load, sum);
        }
        return T(inv * (1 + load));
    }));
}

NormBound ks_norm_bound(const PolymerUniverse& universe, const ActivityMap& activities, const WeightFamily& mu,
                        Mode mode)
{
    if (mu.mu().size() != universe.size()) {
        throw InvalidArgument("weights must list every polymer");
    }
    return make_norm(dispatch(mode, [&]<class T>() {
        const auto rho = activities.radii_as<T>();
        const auto xi = convert_all<T>(mu.polymer_xi());
        T best(0);
        for (std::size_t g = 0; g < universe.size(); ++g) {
            T prod(1);
            universe.neighborhood(g).for_each([&](std::size_t h) { prod *= xi[h]; });
            best = std::max<T>(best, T((1 + rho[g] * prod) / xi[g]));
        }
        return best;
    }));
}

GasValue ks_residual(const KsSystem& system, std::uint64_t local, const ActivityMap& activities, Mode mode)
{
    if (local == 0 || local >= system.table_size()) {
        throw InvalidArgument("KS residual needs a nonempty X inside the region");
    }
    return dispatch(mode, [&]<class T>() {
        const auto z = activities.values_as<T>();
        const auto phi = exact_ratios<T>(system, z);
        const auto p = static_cast<std::size_t>(std::countr_zero(local));
        const std::uint64_t rest = local & (local - 1);
        T r = phi[local] - (rest != 0 ? phi[rest] : T(1));
        const auto coeff = term_coefficients<T>(system, p, z);
        const auto& terms = system.terms(p);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (terms[t].disjoint && (terms[t].extend & local) != 0) {
                continue;
            }
            r += coeff[t] * phi[local | terms[t].extend];
        }
        return r;
    });
}

template <class T>
std::vector<NecessaryRow> necessary_condition_probe(const KsSystem& system, const RegionFunction<T>& xi,
                                                    std::span<const T> rho)
{
    if (system.kind() != KsKind::Abstract) {
        throw InvalidArgument("the necessary-condition probe is defined for abstract gases");
    }
    std::vector<NecessaryRow> rows;
    for (std::size_t i = 0; i < system.elements(); ++i) {
        const std::uint64_t single = std::uint64_t{1} << i;
        const std::uint64_t nbhd = single | system.terms(i).front().extend;
        const T lhs = 1 + rho[system.members()[i]] * xi[nbhd];
        rows.push_back({system.element_id(i), GasValue::of(lhs), GasValue::of(xi[single]), le<T>(lhs, xi[single])});
    }
    return rows;
}

template <class T>
SupersolutionProbe supersolution_probe(const KsSystem& system, const RegionFunction<T>& xi, std::span<const T> rho)
{
    const auto next = t_apply<T>(system, xi, rho);
    SupersolutionProbe out;
    out.holds = true;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::uint64_t x = 1; x < system.table_size(); ++x) {
        out.holds = out.holds && le<T>(next[x], xi[x]);
        const double excess = to_double(T(next[x] - xi[x]));
        if (excess > out.worst_excess) {
            out.worst_excess = excess;
            out.worst = x;
        }
    }
    return out;
}

template std::vector<NecessaryRow> necessary_condition_probe<double>(const KsSystem&, const RegionFunction<double>&,
                                                                     std::span<const double>);
template std::vector<NecessaryRow> necessary_condition_probe<Rational>(const KsSystem&,
                                                                       const RegionFunction<Rational>&,
                                                                       std::span<const Rational>);
template SupersolutionProbe supersolution_probe<double>(const KsSystem&, const RegionFunction<double>&,
                                                        std::span<const double>);
template SupersolutionProbe supersolution_probe<Rational>(const KsSystem&, const RegionFunction<Rational>&,
                                                          std::span<const Rational>);

} // namespace polygas
