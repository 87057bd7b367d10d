#include "polygas/criteria.hpp"

#include "polygas/dispatch.hpp"
#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace polygas {

namespace {

constexpr std::size_t kSolutionNormCap = 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool margin_holds(const GasValue& margin, bool strict)
{
    if (margin.is_exact()) {
        const int s = sgn(margin.exact());
        return strict ? s > 0 : s >= 0;
    }
    const double m = margin.approx();
    return strict ? m > 0 : m >= 0;
}

void finalize(CriterionReport& report)
{
    report.holds = true;
    double worst = kInf;
    for (const auto& e : report.entries) {
        report.holds = report.holds && e.holds;
        const double m = e.margin.approx();
        if (report.worst.empty() || m < worst) {
            worst = m;
            report.worst = e.element;
        }
    }
}

void add_entry(CriterionReport& report, std::string element, GasValue margin)
{
    const bool holds = margin_holds(margin, report.strict);
    report.entries.push_back({std::move(element), std::move(margin), holds});
}

void check_polymer_weights(const WeightFamily& w, std::size_t n)
{
    if (w.scope() != WeightScope::PerPolymer) {
        throw InvalidArgument("this criterion needs per-polymer weights");
    }
    if (w.size() != n) {
        throw InvalidArgument("weights list " + std::to_string(w.size()) + " entries for " + std::to_string(n) +
                              " polymers");
    }
}

void check_site_weights(const WeightFamily& w, std::size_t n)
{
    if (w.scope() != WeightScope::PerSite) {
        throw InvalidArgument("this criterion needs per-site weights");
    }
    if (w.size() != n) {
        throw InvalidArgument("weights list " + std::to_string(w.size()) + " entries for " + std::to_string(n) +
                              " sites");
    }
}

void check_activities(const ActivityMap& a, std::size_t n)
{
    if (a.size() != n) {
        throw InvalidArgument("activity map has " + std::to_string(a.size()) + " entries for " + std::to_string(n) +
                              " polymers");
    }
}

/// KP margins a_g - sum over Gamma(g) of load_h, with load_h = rho_h e^{a_h}.
CriterionReport kp_report(const PolymerUniverse& u, std::span<const double> a, std::span<const double> load)
{
    CriterionReport report{CriterionKind::KP};
    for (std::size_t g = 0; g < u.size(); ++g) {
        double sum = 0;
        u.neighborhood(g).for_each([&](std::size_t h) { sum += load[h]; });
        add_entry(report, u.id(g), GasValue(a[g] - sum));
    }
    finalize(report);
    return report;
}

template <class T>
T product_over(SiteSet s, std::span<const T> xi)
{
    T p(1);
    s.for_each([&](std::size_t x) { p *= xi[x]; });
    return p;
}

template <class T>
std::pair<T, std::size_t> max_site_load(const SubsetUniverse& su, std::span<const T> rho, std::span<const T> xi)
{
    T best(0);
    std::size_t arg = 0;
    for (std::size_t x = 0; x < su.site_count(); ++x) {
        T load(0);
        for (auto g : su.polymers_containing(x)) {
            load += rho[g] * product_over<T>(su.support(g), xi);
        }
        if (x == 0 || load > best) {
            best = load;
            arg = x;
        }
    }
    return {best, arg};
}

/// sup over nonempty X of Xi_{L\X}(-rho) / (Xi_L(-rho) xi^X), L everything.
template <class T>
std::optional<double> solution_norm_from_table(const std::vector<T>& table, const std::vector<T>& xi)
{
    const std::size_t full = table.size() - 1;
    if (!(table[full] > 0)) {
        return std::nullopt;
    }
    double best = 0;
    for (std::size_t x = 1; x <= full; ++x) {
        T weight(1);
        for (std::size_t b = x; b != 0; b &= b - 1) {
            weight *= xi[static_cast<std::size_t>(std::countr_zero(b))];
        }
        const double v = to_double(T(table[full ^ x] / (table[full] * weight)));
        best = std::max(best, v);
    }
    return best;
}

BoundEntry solution_norm_entry(double norm, std::optional<double> exact)
{
    BoundEntry b{BoundKind::SolutionNorm, "sup"};
    b.value = norm < 1 ? 1.0 / (1.0 - norm) : kInf;
    b.exact = exact;
    return b;
}

} // namespace

std::string to_string(CriterionKind kind)
{
    switch (kind) {
    case CriterionKind::KP:
        return "KP";
    case CriterionKind::Dobrushin:
        return "D";
    case CriterionKind::FP:
        return "FP";
    case CriterionKind::GKStrict:
        return "GK-strict";
    case CriterionKind::ExtGK:
        return "ExtGK";
    case CriterionKind::GKContraction:
        return "GK-contraction";
    }
    return "?";
}

std::string to_string(BoundKind kind)
{
    switch (kind) {
    case BoundKind::DoBo:
        return "do.bo";
    case BoundKind::Lovasz:
        return "lovasz";
    case BoundKind::GkBo0:
        return "gk.bo0";
    case BoundKind::GkBo0Weighted:
        return "gk.bo0-weighted";
    case BoundKind::GkBo:
        return "gk.bo";
    case BoundKind::Bdo:
        return "bdo";
    case BoundKind::BPia:
        return "bPia";
    case BoundKind::SolutionNorm:
        return "bbb";
    }
    return "?";
}

CriterionKind parse_criterion_kind(const std::string& text)
{
    static const std::map<std::string, CriterionKind> names{
        {"KP", CriterionKind::KP},
        {"kp", CriterionKind::KP},
        {"D", CriterionKind::Dobrushin},
        {"dobrushin", CriterionKind::Dobrushin},
        {"FP", CriterionKind::FP},
        {"fp", CriterionKind::FP},
        {"GK-strict", CriterionKind::GKStrict},
        {"gk-strict", CriterionKind::GKStrict},
        {"ExtGK", CriterionKind::ExtGK},
        {"extgk", CriterionKind::ExtGK},
        {"ext-gk", CriterionKind::ExtGK},
        {"GK-contraction", CriterionKind::GKContraction},
        {"gk-contraction", CriterionKind::GKContraction},
    };
    auto it = names.find(text);
    if (it == names.end()) {
        throw InvalidArgument("unknown criterion kind '" + text + "'");
    }
    return it->second;
}

bool is_strict(CriterionKind kind)
{
    return kind == CriterionKind::GKStrict || kind == CriterionKind::GKContraction;
}

template <class T>
T phi_dobrushin(const PolymerUniverse& universe, PolymerIndex polymer, std::span<const T> mu)
{
    T p(1);
    universe.neighborhood(polymer).for_each([&](std::size_t h) { p *= T(1) + mu[h]; });
    return p;
}

template <class T>
T phi_fp(const PolymerUniverse& universe, PolymerIndex polymer, std::span<const T> mu)
{
    return partition_function<T>(universe, universe.neighborhood(polymer), mu);
}

template double phi_dobrushin<double>(const PolymerUniverse&, PolymerIndex, std::span<const double>);
template Rational phi_dobrushin<Rational>(const PolymerUniverse&, PolymerIndex, std::span<const Rational>);
template double phi_fp<double>(const PolymerUniverse&, PolymerIndex, std::span<const double>);
template Rational phi_fp<Rational>(const PolymerUniverse&, PolymerIndex, std::span<const Rational>);

double phi_kp(const PolymerUniverse& universe, PolymerIndex polymer, std::span<const double> mu)
{
    double sum = 0;
    universe.neighborhood(polymer).for_each([&](std::size_t h) { sum += mu[h]; });
    return std::exp(sum);
}

GasValue phi_value(const PolymerUniverse& universe, PolymerIndex polymer, const WeightFamily& mu, PhiKind kind,
                   Mode mode)
{
    check_polymer_weights(mu, universe.size());
    if (polymer >= universe.size()) {
        throw InvalidArgument("polymer index out of range");
    }
    if (kind == PhiKind::KP) {
        const auto m = convert_all<double>(mu.mu());
        return GasValue(phi_kp(universe, polymer, m));
    }
    return dispatch(mode, [&]<class T>() {
        const auto m = convert_all<T>(mu.mu());
        return kind == PhiKind::Dobrushin ? phi_dobrushin<T>(universe, polymer, m)
                                          : phi_fp<T>(universe, polymer, m);
    });
}

CriterionReport check_criterion(const PolymerUniverse& universe, const ActivityMap& activities,
                                const WeightFamily& weights, CriterionKind kind, Mode mode)
{
    check_activities(activities, universe.size());
    check_polymer_weights(weights, universe.size());
    switch (kind) {
    case CriterionKind::KP: {
        const auto a = weights.polymer_exponents();
        const auto rho = activities.radii_as<double>();
        const auto xi = convert_all<double>(weights.polymer_xi());
        std::vector<double> load(universe.size());
        for (std::size_t g = 0; g < load.size(); ++g) {
            load[g] = rho[g] * xi[g];
        }
        return kp_report(universe, a, load);
    }
    case CriterionKind::Dobrushin:
    case CriterionKind::FP: {
        CriterionReport report{kind};
        for (std::size_t g = 0; g < universe.size(); ++g) {
            GasValue margin = dispatch(mode, [&]<class T>() {
                const auto mu = convert_all<T>(weights.mu());
                const auto rho = activities.radii_as<T>();
                const T phi = kind == CriterionKind::Dobrushin ? phi_dobrushin<T>(universe, g, mu)
                                                               : phi_fp<T>(universe, g, mu);
                return T(mu[g] - rho[g] * phi);
            });
            add_entry(report, universe.id(g), std::move(margin));
        }
        finalize(report);
        return report;
    }
    case CriterionKind::GKContraction: {
        CriterionReport report{kind, true};
        for (std::size_t g = 0; g < universe.size(); ++g) {
            GasValue margin = dispatch(mode, [&]<class T>() {
                const auto xi = convert_all<T>(weights.polymer_xi());
                const auto rho = activities.radii_as<T>();
                T prod(1);
                universe.neighborhood(g).for_each([&](std::size_t h) { prod *= xi[h]; });
                return T(1 - (1 + rho[g] * prod) / xi[g]);
            });
            add_entry(report, universe.id(g), std::move(margin));
        }
        finalize(report);
        return report;
    }
    case CriterionKind::GKStrict:
    case CriterionKind::ExtGK:
        throw InvalidArgument(to_string(kind) + " needs a subset universe");
    }
    throw InvalidArgument("unknown criterion kind");
}

std::vector<Rational> factorized_mu(const SubsetUniverse& universe, const ActivityMap& activities,
                                    const WeightFamily& site_weights)
{
    check_site_weights(site_weights, universe.site_count());
    check_activities(activities, universe.polymer_count());
    std::vector<Rational> mu;
    for (std::size_t g = 0; g < universe.polymer_count(); ++g) {
        mu.push_back(activities.radii()[g] * site_weights.site_product(universe.support(g)));
    }
    return mu;
}

CriterionReport check_criterion(const SubsetUniverse& universe, const ActivityMap& activities,
                                const WeightFamily& weights, CriterionKind kind, Mode mode)
{
    check_activities(activities, universe.polymer_count());
    switch (kind) {
    case CriterionKind::KP:
        if (weights.scope() == WeightScope::PerSite) {
            check_site_weights(weights, universe.site_count());
            const auto rho = activities.radii_as<double>();
            const auto ax = weights.site_exponents();
            const auto xi = convert_all<double>(weights.site_xi());
            std::vector<double> a(universe.polymer_count());
            std::vector<double> load(universe.polymer_count());
            for (std::size_t g = 0; g < a.size(); ++g) {
                universe.support(g).for_each([&](std::size_t x) { a[g] += ax[x]; });
                load[g] = rho[g] * product_over<double>(universe.support(g), xi);
            }
            return kp_report(universe.abstract(), a, load);
        }
        return check_criterion(universe.abstract(), activities, weights, kind, mode);
    case CriterionKind::Dobrushin:
    case CriterionKind::FP:
        if (weights.scope() == WeightScope::PerSite) {
            return check_criterion(universe.abstract(), activities,
                                   WeightFamily::polymer_mu(factorized_mu(universe, activities, weights)), kind,
                                   mode);
        }
        return check_criterion(universe.abstract(), activities, weights, kind, mode);
    case CriterionKind::ExtGK: {
        check_site_weights(weights, universe.site_count());
        CriterionReport report{kind};
        for (std::size_t x = 0; x < universe.site_count(); ++x) {
            GasValue margin = dispatch(mode, [&]<class T>() {
                const auto rho = activities.radii_as<T>();
                const auto xi = convert_all<T>(weights.site_xi());
                return site_criterion_margin<T>(universe, x, rho, xi);
            });
            add_entry(report, universe.site_ids()[x], std::move(margin));
        }
        finalize(report);
        return report;
    }
    case CriterionKind::GKStrict: {
        check_site_weights(weights, universe.site_count());
        if (!weights.is_uniform()) {
            throw InvalidArgument("GK-strict needs a uniform site weight a");
        }
        CriterionReport report{kind, true};
        std::size_t arg = 0;
        GasValue margin = dispatch(mode, [&]<class T>() {
            const auto rho = activities.radii_as<T>();
            const auto xi = convert_all<T>(weights.site_xi());
            auto [load, where] = max_site_load<T>(universe, rho, xi);
            arg = where;
            return T(xi.empty() ? T(0) : T(xi[0] - 1 - load));
        });
        add_entry(report, universe.site_count() ? universe.site_ids()[arg] : "sup", std::move(margin));
        finalize(report);
        return report;
    }
    case CriterionKind::GKContraction: {
        check_site_weights(weights, universe.site_count());
        CriterionReport report{kind, true};
        std::size_t arg = 0;
        GasValue margin = dispatch(mode, [&]<class T>() {
            const auto rho = activities.radii_as<T>();
            const auto xi = convert_all<T>(weights.site_xi());
            auto [load, where] = max_site_load<T>(universe, rho, xi);
            arg = where;
            T inv_min(0);
            for (const auto& v : xi) {
                inv_min = std::max<T>(inv_min, T(1 / v));
            }
            return T(1 - inv_min * (1 + load));
        });
        add_entry(report, universe.site_count() ? universe.site_ids()[arg] : "sup", std::move(margin));
        finalize(report);
        return report;
    }
    }
    throw InvalidArgument("unknown criterion kind");
}

double bound_value(const PolymerUniverse& universe, PolymerIndex polymer, const ActivityMap& activities,
                   const WeightFamily& mu, BoundKind kind)
{
    check_polymer_weights(mu, universe.size());
    check_activities(activities, universe.size());
    const auto m = convert_all<Rational>(mu.mu());
    const Rational& rho = activities.radii()[polymer];
    switch (kind) {
    case BoundKind::DoBo:
        return std::log1p(to_double(m[polymer]));
    case BoundKind::Lovasz: {
        if (rho >= 1) {
            throw InvalidArgument("lovasz bound undefined for rho >= 1 at '" + universe.id(polymer) + "'");
        }
        const Rational excess = phi_fp<Rational>(universe, polymer, m) - m[polymer];
        return -to_double(excess) * std::log1p(-to_double(rho));
    }
    case BoundKind::Bdo:
        return to_double(phi_dobrushin<Rational>(universe, polymer, m));
    case BoundKind::BPia:
        return to_double(phi_fp<Rational>(universe, polymer, m));
    default:
        throw InvalidArgument(to_string(kind) + " is not a per-polymer bound");
    }
}

double bound_value(const SubsetUniverse& universe, std::size_t site, const ActivityMap& activities,
                   const WeightFamily& site_weights, BoundKind kind)
{
    check_site_weights(site_weights, universe.site_count());
    check_activities(activities, universe.polymer_count());
    const auto& xi = site_weights.site_xi();
    switch (kind) {
    case BoundKind::GkBo:
        return std::log(to_double(xi.at(site)));
    case BoundKind::BPia:
        return to_double(xi.at(site));
    case BoundKind::GkBo0:
    case BoundKind::GkBo0Weighted: {
        if (!site_weights.is_uniform()) {
            throw InvalidArgument("gk.bo0 needs a uniform site weight a");
        }
        const double a = std::log(to_double(xi.at(site)));
        const double e = kind == BoundKind::GkBo0 ? 1.0 : a;
        const auto rho = activities.radii_as<double>();
        double best = 0;
        for (std::size_t x = 0; x < universe.site_count(); ++x) {
            double load = 0;
            for (auto g : universe.polymers_containing(x)) {
                load += rho[g] * std::exp(e * static_cast<double>(universe.support(g).size()));
            }
            best = std::max(best, load);
        }
        return std::exp(-a) * (1 + best);
    }
    default:
        throw InvalidArgument(to_string(kind) + " is not a per-site bound");
    }
}

void attach_bounds(CriterionReport& report, const PolymerUniverse& universe, const ActivityMap& activities,
                   const WeightFamily& weights, Mode mode)
{
    const bool converges = radii_in_convergence_region(universe, universe.all(), activities);
    auto exact_theta = [&](std::size_t g) -> std::optional<double> {
        if (!converges) {
            return std::nullopt;
        }
        return theta(universe, universe.all(), g, activities, SeriesMode::AbsAtRadius, mode).value();
    };
    auto exact_pi = [&](std::size_t g) -> std::optional<double> {
        if (!converges) {
            return std::nullopt;
        }
        return pi(universe, universe.all(), g, activities, SeriesMode::AbsAtRadius, mode).approx();
    };
    auto push = [&](BoundKind k, std::size_t g, double value, std::optional<double> exact) {
        BoundEntry b{k, universe.id(g), value, exact, !report.holds};
        if (!converges) {
            b.note = "radii outside the convergence region";
        }
        report.bounds.push_back(std::move(b));
    };
    switch (report.kind) {
    case CriterionKind::Dobrushin:
        for (std::size_t g = 0; g < universe.size(); ++g) {
            push(BoundKind::DoBo, g, bound_value(universe, g, activities, weights, BoundKind::DoBo), exact_theta(g));
            push(BoundKind::Bdo, g, bound_value(universe, g, activities, weights, BoundKind::Bdo), exact_pi(g));
        }
        break;
    case CriterionKind::FP:
        for (std::size_t g = 0; g < universe.size(); ++g) {
            if (activities.radii()[g] < 1) {
                push(BoundKind::Lovasz, g, bound_value(universe, g, activities, weights, BoundKind::Lovasz),
                     exact_theta(g));
            }
            push(BoundKind::BPia, g, bound_value(universe, g, activities, weights, BoundKind::BPia), exact_pi(g));
        }
        break;
    case CriterionKind::GKContraction: {
        double norm = 0;
        for (const auto& e : report.entries) {
            norm = std::max(norm, 1 - e.margin.approx());
        }
        std::optional<double> exact;
        if (universe.size() <= kSolutionNormCap) {
            auto from = [&]<class T>() {
                const auto table = partition_table<T>(universe, universe.all(), activities.negated_radii_as<T>());
                return solution_norm_from_table<T>(table, convert_all<T>(weights.polymer_xi()));
            };
            exact = mode == Mode::Exact ? from.template operator()<Rational>() : from.template operator()<double>();
        }
        auto b = solution_norm_entry(norm, exact);
        b.flagged = !report.holds;
        report.bounds.push_back(std::move(b));
        break;
    }
    default:
        break;
    }
}

void attach_bounds(CriterionReport& report, const SubsetUniverse& universe, const ActivityMap& activities,
                   const WeightFamily& weights, Mode mode)
{
    if (report.kind == CriterionKind::Dobrushin || report.kind == CriterionKind::FP) {
        const WeightFamily mu = weights.scope() == WeightScope::PerSite
                                    ? WeightFamily::polymer_mu(factorized_mu(universe, activities, weights))
                                    : weights;
        attach_bounds(report, universe.abstract(), activities, mu, mode);
        return;
    }
    if (report.kind == CriterionKind::KP) {
        return;
    }
    const SiteSet all = universe.all_sites();
    bool converges = true;
    try {
        if (universe.site_count() > 0) {
            site_theta(universe, all, 0, activities, SeriesMode::AbsAtRadius, Mode::Float);
        }
    } catch (const DivergenceIndicator&) {
        converges = false;
    }
    const std::string note = converges ? "" : "radii outside the convergence region";
    if (report.kind == CriterionKind::ExtGK) {
        for (std::size_t x = 0; x < universe.site_count(); ++x) {
            std::optional<double> theta_exact;
            std::optional<double> pi_exact;
            if (converges) {
                theta_exact = site_theta(universe, all, x, activities, SeriesMode::AbsAtRadius, mode).value();
                pi_exact = site_pi(universe, all, x, activities, SeriesMode::AbsAtRadius, mode).approx();
            }
            const auto& id = universe.site_ids()[x];
            report.bounds.push_back({BoundKind::GkBo, id,
                                     bound_value(universe, x, activities, weights, BoundKind::GkBo), theta_exact,
                                     !report.holds, note});
            report.bounds.push_back({BoundKind::BPia, id,
                                     bound_value(universe, x, activities, weights, BoundKind::BPia), pi_exact,
                                     !report.holds, note});
        }
        return;
    }
    double norm = 1 - report.entries.front().margin.approx();
    std::optional<double> exact;
    if (converges && universe.site_count() <= kSolutionNormCap) {
        auto from = [&]<class T>() {
            const auto table = region_partition_table<T>(universe, all, activities.negated_radii_as<T>());
            return solution_norm_from_table<T>(table, convert_all<T>(weights.site_xi()));
        };
        exact = mode == Mode::Exact ? from.template operator()<Rational>() : from.template operator()<double>();
    }
    if (report.kind == CriterionKind::GKStrict && universe.site_count() > 0) {
        const std::size_t x = universe.site_index(report.worst);
        report.bounds.push_back({BoundKind::GkBo0, "sup",
                                 bound_value(universe, x, activities, weights, BoundKind::GkBo0), std::nullopt,
                                 true, "operator-norm bound as displayed; not compared with |Theta|"});
        report.bounds.push_back({BoundKind::GkBo0Weighted, "sup",
                                 bound_value(universe, x, activities, weights, BoundKind::GkBo0Weighted),
                                 std::nullopt, true, "a-weighted variant"});
        // The decoupled norm bound at uniform weight equals the weighted variant.
        norm = report.bounds.back().value;
    }
    auto b = solution_norm_entry(norm, exact);
    b.flagged = !report.holds;
    b.note = note;
    report.bounds.push_back(std::move(b));
}

namespace {

/// log(1 + cap): the search runs on t = log(1 + mu) or on a.
double search_upper(const RadiusSearch& s) { return std::log1p(s.upper); }

template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol)
{
    const double invphi = (std::sqrt(5.0) - 1) / 2;
    double a = lo;
    double b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = (a + b) / 2;
    return {x, f(x)};
}

void require_homogeneous(bool ok)
{
    if (!ok) {
        throw InvalidArgument("non-homogeneous model: the elements differ under this criterion");
    }
}

void check_abstract_homogeneity(const PolymerUniverse& u, CriterionKind kind)
{
    if (u.size() == 0) {
        throw InvalidArgument("radius search needs at least one polymer");
    }
    const std::size_t size0 = u.neighborhood(0).size();
    for (std::size_t g = 1; g < u.size(); ++g) {
        require_homogeneous(u.neighborhood(g).size() == size0);
    }
    if (kind == CriterionKind::FP) {
        for (const Rational& probe : {Rational(1, 3), Rational(2), Rational(7)}) {
            const std::vector<Rational> mu(u.size(), probe);
            const Rational ref = phi_fp<Rational>(u, 0, mu);
            for (std::size_t g = 1; g < u.size(); ++g) {
                require_homogeneous(phi_fp<Rational>(u, g, mu) == ref);
            }
        }
    }
}

std::vector<std::size_t> size_signature(const SubsetUniverse& su, std::size_t x)
{
    std::vector<std::size_t> sizes;
    for (auto g : su.polymers_containing(x)) {
        sizes.push_back(su.support(g).size());
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

RadiusResult finish(CriterionKind kind, std::pair<double, double> best, const RadiusSearch& s, bool mu_scale)
{
    RadiusResult r{kind};
    r.radius = best.second;
    r.argmax = mu_scale ? std::expm1(best.first) : best.first;
    r.at_cap = best.first >= search_upper(s) - 1e-6;
    return r;
}

} // namespace

double uniform_radius(const PolymerUniverse& universe, CriterionKind kind, double weight)
{
    double best = kInf;
    switch (kind) {
    case CriterionKind::Dobrushin:
    case CriterionKind::FP: {
        const std::vector<double> mu(universe.size(), weight);
        for (std::size_t g = 0; g < universe.size(); ++g) {
            const double phi = kind == CriterionKind::Dobrushin ? phi_dobrushin<double>(universe, g, mu)
                                                                : phi_fp<double>(universe, g, mu);
            best = std::min(best, weight / phi);
        }
        return best;
    }
    case CriterionKind::KP:
        for (std::size_t g = 0; g < universe.size(); ++g) {
            const double n = static_cast<double>(universe.neighborhood(g).size());
            best = std::min(best, weight * std::exp(-weight) / n);
        }
        return best;
    default:
        throw InvalidArgument(to_string(kind) + " has no uniform radius on an abstract gas");
    }
}

double uniform_radius(const SubsetUniverse& universe, CriterionKind kind, double weight)
{
    if (kind != CriterionKind::ExtGK) {
        return uniform_radius(universe.abstract(), kind, weight);
    }
    double best = kInf;
    for (std::size_t x = 0; x < universe.site_count(); ++x) {
        double load = 0;
        for (auto g : universe.polymers_containing(x)) {
            load += std::exp(weight * static_cast<double>(universe.support(g).size()));
        }
        if (load > 0) {
            best = std::min(best, std::expm1(weight) / load);
        }
    }
    return best;
}

RadiusResult optimize_uniform_weight(const PolymerUniverse& universe, CriterionKind kind, const RadiusSearch& search)
{
    if (kind != CriterionKind::Dobrushin && kind != CriterionKind::FP && kind != CriterionKind::KP) {
        throw InvalidArgument(to_string(kind) + " radius search needs a subset universe");
    }
    check_abstract_homogeneity(universe, kind);
    const bool mu_scale = kind != CriterionKind::KP;
    auto f = [&](double t) { return uniform_radius(universe, kind, mu_scale ? std::expm1(t) : t); };
    return finish(kind, golden_section_max(f, std::log1p(search.lower), search_upper(search), search.tolerance),
                  search, mu_scale);
}

RadiusResult optimize_uniform_weight(const SubsetUniverse& universe, CriterionKind kind, const RadiusSearch& search)
{
    if (kind != CriterionKind::ExtGK) {
        return optimize_uniform_weight(universe.abstract(), kind, search);
    }
    if (universe.site_count() == 0) {
        throw InvalidArgument("radius search needs at least one site");
    }
    const auto sig = size_signature(universe, 0);
    for (std::size_t x = 1; x < universe.site_count(); ++x) {
        require_homogeneous(size_signature(universe, x) == sig);
    }
    auto f = [&](double a) { return uniform_radius(universe, kind, a); };
    return finish(kind, golden_section_max(f, std::log1p(search.lower), search_upper(search), search.tolerance),
                  search, false);
}

namespace {

CriterionReport kp_from_mu(const PolymerUniverse& u, const ActivityMap& activities, const std::vector<Rational>& mu)
{
    std::vector<double> a(u.size());
    std::vector<double> load(u.size());
    for (std::size_t g = 0; g < u.size(); ++g) {
        const Rational& rho = activities.radii()[g];
        load[g] = to_double(mu[g]);
        if (rho == 0) {
            a[g] = kInf;
        } else if (mu[g] == 0) {
            a[g] = -kInf;
        } else {
            a[g] = std::log(to_double(mu[g])) - std::log(to_double(rho));
        }
    }
    return kp_report(u, a, load);
}

void chain_check(Comparison& out, const std::vector<std::string>& ids, const CriterionReport& stronger,
                 const CriterionReport& weaker)
{
    for (std::size_t g = 0; g < ids.size(); ++g) {
        if (stronger.entries[g].holds && !weaker.entries[g].holds) {
            out.chain_consistent = false;
            out.violations.push_back(to_string(stronger.kind) + " holds but " + to_string(weaker.kind) +
                                     " fails at " + ids[g]);
        }
    }
}

} // namespace

Comparison compare_criteria(const PolymerUniverse& universe, const ActivityMap& activities, const WeightFamily& mu,
                            Mode mode)
{
    check_polymer_weights(mu, universe.size());
    Comparison out;
    auto kp = kp_from_mu(universe, activities, mu.mu());
    auto d = check_criterion(universe, activities, mu, CriterionKind::Dobrushin, mode);
    auto fp = check_criterion(universe, activities, mu, CriterionKind::FP, mode);
    auto gkc = check_criterion(universe, activities, mu, CriterionKind::GKContraction, mode);
    chain_check(out, universe.ids(), kp, d);
    chain_check(out, universe.ids(), d, fp);
    attach_bounds(d, universe, activities, mu, mode);
    attach_bounds(fp, universe, activities, mu, mode);
    attach_bounds(gkc, universe, activities, mu, mode);
    out.reports = {std::move(kp), std::move(d), std::move(fp), std::move(gkc)};
    return out;
}

Comparison compare_criteria(const SubsetUniverse& universe, const ActivityMap& activities,
                            const WeightFamily& weights, Mode mode)
{
    if (weights.scope() == WeightScope::PerPolymer) {
        return compare_criteria(universe.abstract(), activities, weights, mode);
    }
    const WeightFamily mu = WeightFamily::polymer_mu(factorized_mu(universe, activities, weights));
    Comparison out = compare_criteria(universe.abstract(), activities, mu, mode);
    auto ext = check_criterion(universe, activities, weights, CriterionKind::ExtGK, mode);
    // ExtGK at every site of g implies FP at g with the factorized mu.
    const auto& fp = out.reports[2];
    for (std::size_t g = 0; g < universe.polymer_count(); ++g) {
        bool sites_hold = true;
        universe.support(g).for_each([&](std::size_t x) { sites_hold = sites_hold && ext.entries[x].holds; });
        if (sites_hold && !fp.entries[g].holds) {
            out.chain_consistent = false;
            out.violations.push_back("ExtGK holds on the sites of " + universe.polymer_ids()[g] +
                                     " but FP fails there");
        }
    }
    attach_bounds(ext, universe, activities, weights, mode);
    out.reports.push_back(std::move(ext));
    if (weights.is_uniform()) {
        auto strict = check_criterion(universe, activities, weights, CriterionKind::GKStrict, mode);
        attach_bounds(strict, universe, activities, weights, mode);
        out.reports.push_back(std::move(strict));
    }
    // The abstract contraction row is replaced by the site-weighted one.
    auto contraction = check_criterion(universe, activities, weights, CriterionKind::GKContraction, mode);
    attach_bounds(contraction, universe, activities, weights, mode);
    out.reports[3] = std::move(contraction);
    return out;
}

} // namespace polygas
