#include "polygas/run.hpp"

#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"
#include "polygas/ks_engine.hpp"
#include "polygas/ursell.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

namespace polygas {

namespace {

constexpr std::size_t kAllSubsetsCap = 10;
constexpr int kRandomDraws = 8;
constexpr double kFloatZeroTol = 1e-9;

std::string fmt(double x) { return format_double(x); }
std::string fmt(const GasValue& v) { return v.str(); }
std::string fmt(const std::optional<double>& x) { return x ? format_double(*x) : ""; }
std::string verdict(bool holds) { return holds ? "holds" : "fails"; }

bool is_zero(const GasValue& v)
{
    return v.is_exact() ? v.is_zero() : std::abs(v.approx()) <= kFloatZeroTol;
}

GasValue difference(const GasValue& a, const GasValue& b)
{
    if (a.is_exact() && b.is_exact()) {
        return GasValue(Rational(a.exact() - b.exact()));
    }
    return GasValue(a.approx() - b.approx());
}

struct Context {
    const Model& model;
    Mode mode;
    std::uint64_t seed;
    int max_order;
    int ks_steps;
    std::optional<CriterionKind> kind;
};

std::string label(const std::vector<std::string>& ids, std::uint64_t bits)
{
    std::string out;
    for (auto b = bits; b != 0; b &= b - 1) {
        out += (out.empty() ? "" : ",") + ids[static_cast<std::size_t>(std::countr_zero(b))];
    }
    return "{" + out + "}";
}

/// Region as a global mask over polymers (abstract) or sites (subset).
std::uint64_t region_bits(const Model& m)
{
    const auto& r = m.spec.run.region;
    if (m.is_subset()) {
        return r.empty() ? m.subset_universe->all_sites().bits() : m.subset_universe->sites_of(r).bits();
    }
    return r.empty() ? m.abstract_universe->all().bits() : m.abstract_universe->set_of(r).bits();
}

const std::vector<std::string>& element_ids(const Model& m)
{
    return m.is_subset() ? m.subset_universe->site_ids() : m.abstract_universe->ids();
}

std::vector<std::uint64_t> tracked_bits(const Model& m, std::uint64_t region)
{
    std::vector<std::uint64_t> out;
    for (const auto& ids : m.spec.run.tracked) {
        const std::uint64_t bits = m.is_subset() ? m.subset_universe->sites_of(ids).bits()
                                                 : m.abstract_universe->set_of(ids).bits();
        if (bits == 0 || (bits & ~region) != 0) {
            throw InvalidArgument("tracked set " + label(element_ids(m), bits) + " is not a nonempty part of the region");
        }
        out.push_back(bits);
    }
    return out;
}

ActivityMap at_minus_rho(const ActivityMap& a)
{
    std::vector<Rational> neg = a.radii();
    for (auto& x : neg) {
        x = -x;
    }
    return ActivityMap(neg, a.radii());
}

// xi ---------------------------------------------------------------------

Report command_xi(const Context& c)
{
    const Model& m = c.model;
    m.require_activity();
    Report r;
    Table t{{"quantity", "element", "value"}};
    const std::uint64_t region = region_bits(m);
    const std::string name = label(element_ids(m), region);
    const ActivityMap minus = at_minus_rho(m.activities);
    GasValue xi;
    if (m.is_subset()) {
        const auto& su = *m.subset_universe;
        const SiteSet s = SiteSet::from_bits(region);
        xi = region_partition_function(su, s, m.activities, c.mode);
        t.add({"Xi", name, fmt(xi)});
        t.add({"Xi(-rho)", name, fmt(region_partition_function(su, s, minus, c.mode))});
        for (auto x : tracked_bits(m, region)) {
            t.add({"reduced_correlation", label(su.site_ids(), x),
                   fmt(region_reduced_correlation(su, s, SiteSet::from_bits(x), m.activities, c.mode))});
        }
    } else {
        const auto& u = *m.abstract_universe;
        const PolymerSet s = PolymerSet::from_bits(region);
        xi = partition_function(u, s, m.activities, c.mode);
        t.add({"Xi", name, fmt(xi)});
        t.add({"Xi(-rho)", name, fmt(partition_function(u, s, minus, c.mode))});
        for (auto x : tracked_bits(m, region)) {
            t.add({"reduced_correlation", label(u.ids(), x),
                   fmt(reduced_correlation(u, s, PolymerSet::from_bits(x), m.activities, c.mode))});
        }
    }
    const double log_xi = xi.approx() > 0 ? std::log(xi.approx()) : std::nan("");
    t.add({"log_Xi", name, xi.approx() > 0 ? fmt(log_xi) : "undefined"});
    r.tables["report"] = std::move(t);

    // Cluster expansion partial sums on the polymers inside the region.
    std::optional<PolymerSet> family;
    if (!m.is_subset()) {
        family = PolymerSet::from_bits(region);
    } else if (m.subset_universe->has_abstract()) {
        family = m.subset_universe->polymers_within(SiteSet::from_bits(region));
    }
    if (family && c.max_order >= 1) {
        try {
            MayerOptions opt;
            opt.max_order = std::max(c.max_order, kDefaultMayerMaxOrder);
            const auto sums = mayer_partial_sums(m.polymers(), *family, m.activities, c.max_order, c.mode, opt);
            Table mayer{{"order", "partial_sum", "log_xi", "difference"}};
            for (std::size_t i = 0; i < sums.size(); ++i) {
                const double d = sums[i].approx() - log_xi;
                mayer.add({std::to_string(i + 1), fmt(sums[i]), fmt(log_xi), fmt(d)});
            }
            r.tables["mayer"] = std::move(mayer);
        } catch (const ResourceLimit& e) {
            r.notes.push_back(std::string("mayer partial sums skipped: ") + e.what());
        }
    }
    return r;
}

// theta ------------------------------------------------------------------

Report command_theta(const Context& c)
{
    const Model& m = c.model;
    m.require_activity();
    Report r;
    Table t{{"element", "series", "theta", "theta_argument", "pi"}};
    const std::uint64_t region = region_bits(m);
    for (auto b = region; b != 0; b &= b - 1) {
        const auto e = static_cast<std::size_t>(std::countr_zero(b));
        for (SeriesMode series : {SeriesMode::Signed, SeriesMode::AbsAtRadius}) {
            const std::string sname = series == SeriesMode::Signed ? "signed" : "abs";
            std::vector<std::string> row{element_ids(m)[e], sname};
            try {
                LogRatio th = m.is_subset() ? site_theta(*m.subset_universe, SiteSet::from_bits(region), e,
                                                         m.activities, series, c.mode)
                                            : theta(*m.abstract_universe, PolymerSet::from_bits(region), e,
                                                    m.activities, series, c.mode);
                GasValue p = m.is_subset() ? site_pi(*m.subset_universe, SiteSet::from_bits(region), e,
                                                     m.activities, series, c.mode)
                                           : pi(*m.abstract_universe, PolymerSet::from_bits(region), e,
                                                m.activities, series, c.mode);
                row.push_back(fmt(th.value()));
                row.push_back(fmt(th.argument));
                row.push_back(fmt(p));
            } catch (const DivergenceIndicator& ex) {
                row.insert(row.end(), {"diverges", "", ""});
                r.notes.push_back(element_ids(m)[e] + " (" + sname + "): " + ex.what());
            } catch (const NormalizationFailure& ex) {
                row.insert(row.end(), {"undefined", "", ""});
                r.notes.push_back(element_ids(m)[e] + " (" + sname + "): " + ex.what());
            }
            t.add(std::move(row));
        }
    }
    r.tables["report"] = std::move(t);
    return r;
}

// criteria / bounds / compare ---------------------------------------------

Table criteria_table() { return Table{{"kind", "element", "margin", "holds", "bound_kind", "bound_value", "exact_value", "slack"}}; }

Comparison comparison(const Context& c)
{
    const Model& m = c.model;
    m.require_activity();
    const WeightFamily& w = m.require_weights();
    return m.is_subset() ? compare_criteria(*m.subset_universe, m.activities, w, c.mode)
                         : compare_criteria(*m.abstract_universe, m.activities, w, c.mode);
}

void margin_rows(Table& t, const CriterionReport& rep)
{
    for (const auto& e : rep.entries) {
        t.add({to_string(rep.kind), e.element, fmt(e.margin), verdict(e.holds), "", "", "", ""});
    }
}

void summary_row(Table& t, const CriterionReport& rep)
{
    std::string worst_margin;
    for (const auto& e : rep.entries) {
        if (e.element == rep.worst) {
            worst_margin = fmt(e.margin);
        }
    }
    t.add({to_string(rep.kind), "all", worst_margin, verdict(rep.holds), "", "", "", ""});
}

void bound_rows(Table& t, const CriterionReport& rep)
{
    for (const auto& b : rep.bounds) {
        t.add({to_string(rep.kind), b.element, "", b.flagged ? "flagged" : verdict(rep.holds), to_string(b.kind),
               fmt(b.value), fmt(b.exact), fmt(b.slack())});
    }
}

Report command_criteria(const Context& c, const std::string& which)
{
    const Comparison cmp = comparison(c);
    Report r;
    Table t = criteria_table();
    bool any = false;
    for (const auto& rep : cmp.reports) {
        if (which == "criteria" && c.kind && rep.kind != *c.kind) {
            continue;
        }
        any = any || rep.holds;
        if (which != "bounds") {
            margin_rows(t, rep);
        }
        summary_row(t, rep);
        if (which != "criteria") {
            bound_rows(t, rep);
        }
        for (const auto& b : rep.bounds) {
            if (!b.note.empty()) {
                r.notes.push_back(to_string(rep.kind) + " " + to_string(b.kind) + " " + b.element + ": " + b.note);
            }
        }
    }
    r.tables["report"] = std::move(t);
    if (which == "compare") {
        Table chain{{"check", "consistent", "detail"}};
        chain.add({"KP=>D=>FP", cmp.chain_consistent ? "true" : "false", ""});
        for (const auto& v : cmp.violations) {
            chain.add({"violation", "false", v});
        }
        r.tables["chain"] = std::move(chain);
        r.status = cmp.chain_consistent ? 0 : 2;
    } else {
        r.status = any ? 0 : 2;
    }
    return r;
}

// KS ---------------------------------------------------------------------

KsSystem system_of(const Model& m)
{
    const std::uint64_t region = region_bits(m);
    return m.is_subset() ? KsSystem::subset(*m.subset_universe, SiteSet::from_bits(region))
                         : KsSystem::abstract(*m.abstract_universe, PolymerSet::from_bits(region));
}

std::optional<NormBound> norm_of(const Context& c)
{
    const Model& m = c.model;
    if (!m.weights) {
        return std::nullopt;
    }
    if (m.is_subset()) {
        if (m.weights->scope() != WeightScope::PerSite) {
            return std::nullopt;
        }
        return ks_norm_bound(*m.subset_universe, m.activities, *m.weights, c.mode);
    }
    return ks_norm_bound(*m.abstract_universe, m.activities, *m.weights, c.mode);
}

Report command_ks_iterate(const Context& c)
{
    const Model& m = c.model;
    m.require_activity();
    const WeightFamily& w = m.require_weights();
    const KsSystem sys = system_of(m);
    Report r;
    Table t{{"check", "element", "value", "holds"}};
    const auto precheck = ks_precheck(sys, m.activities, w, c.mode);
    bool start = true;
    for (const auto& [element, margin] : precheck) {
        const bool ok = margin.is_exact() ? sgn(margin.exact()) >= 0 : margin.approx() >= 0;
        start = start && ok;
        t.add({"precheck", element, fmt(margin), verdict(ok)});
    }
    if (!start) {
        r.status = 2;
        r.notes.push_back("factorized start condition fails; no iteration performed");
        r.tables["report"] = std::move(t);
        return r;
    }
    std::vector<std::uint64_t> tracked;
    for (auto x : tracked_bits(m, sys.region_bits())) {
        tracked.push_back(sys.to_local(x));
    }
    const KsTrace trace = t_iterate(sys, m.activities, w, c.ks_steps, tracked, c.mode);
    Table tr{{"iteration", "X", "value", "exact", "slack"}};
    for (const auto& row : trace.rows) {
        tr.add({std::to_string(row.iteration), row.label, fmt(row.value), fmt(row.exact),
                fmt(difference(row.value, row.exact))});
    }
    t.add({"start", "T xi0 <= xi0", "", verdict(trace.start_ok)});
    t.add({"monotone", "T^k xi0 <= T^(k-1) xi0", "", verdict(trace.monotone)});
    t.add({"dominated", "exact <= T^k xi0", "", verdict(trace.dominated)});
    if (auto nb = norm_of(c)) {
        t.add({"norm", "K", fmt(nb->norm), verdict(nb->contraction)});
    }
    r.tables["report"] = std::move(t);
    r.tables["trace"] = std::move(tr);
    r.status = trace.start_ok && trace.monotone && trace.dominated ? 0 : 2;
    return r;
}

template <class T>
void neumann_tables(const Context& c, const KsSystem& sys, const std::vector<std::uint64_t>& tracked, Report& r)
{
    const auto rho = c.model.activities.radii_as<T>();
    const auto partials = neumann_partials<T>(sys, std::span<const T>(rho), c.ks_steps, tracked);
    std::optional<RegionFunction<T>> exact;
    try {
        const auto neg = c.model.activities.negated_radii_as<T>();
        exact = exact_ratios<T>(sys, std::span<const T>(neg));
    } catch (const NormalizationFailure& e) {
        r.notes.push_back(e.what());
    }
    Table tr{{"k", "X", "partial", "exact", "error"}};
    Table t{{"X", "partial", "exact", "error"}};
    for (std::size_t k = 0; k < partials.size(); ++k) {
        for (std::size_t i = 0; i < tracked.size(); ++i) {
            const GasValue p = GasValue::of(partials[k][i]);
            std::vector<std::string> row{std::to_string(k), sys.describe(tracked[i]), fmt(p), "", ""};
            if (exact) {
                const GasValue e = GasValue::of((*exact)[tracked[i]]);
                row[3] = fmt(e);
                row[4] = fmt(difference(e, p));
            }
            if (k + 1 == partials.size()) {
                t.add({row[1], row[2], row[3], row[4]});
            }
            tr.add(std::move(row));
        }
    }
    r.tables["report"] = std::move(t);
    r.tables["trace"] = std::move(tr);
}

Report command_neumann(const Context& c)
{
    const Model& m = c.model;
    m.require_activity();
    const KsSystem sys = system_of(m);
    std::vector<std::uint64_t> tracked;
    for (auto x : tracked_bits(m, sys.region_bits())) {
        tracked.push_back(sys.to_local(x));
    }
    if (tracked.empty()) {
        for (std::size_t i = 0; i < sys.elements(); ++i) {
            tracked.push_back(std::uint64_t{1} << i);
        }
    }
    Report r;
    if (c.mode == Mode::Exact) {
        neumann_tables<Rational>(c, sys, tracked, r);
    } else {
        neumann_tables<double>(c, sys, tracked, r);
    }
    if (auto nb = norm_of(c)) {
        r.notes.push_back("norm bound " + fmt(nb->norm) + (nb->contraction ? " (contraction)" : " (no contraction)"));
    }
    return r;
}

// verify-identities ------------------------------------------------------

std::uint64_t random_subset(std::mt19937_64& rng, std::uint64_t of)
{
    return rng() & of;
}

void add_residual(Table& t, bool& all_zero, const std::string& identity, const std::string& element,
                  const GasValue& residual)
{
    const bool zero = is_zero(residual);
    all_zero = all_zero && zero;
    t.add({identity, element, fmt(residual), zero ? "true" : "false"});
}

void ks_residual_rows(const Context& c, const KsSystem& sys, const std::string& name, Table& t, bool& ok,
                      std::mt19937_64& rng)
{
    const std::uint64_t full = sys.table_size() - 1;
    std::vector<std::uint64_t> xs;
    if (sys.elements() <= kAllSubsetsCap) {
        for (std::uint64_t x = 1; x <= full; ++x) {
            xs.push_back(x);
        }
    } else {
        for (int i = 0; i < 64; ++i) {
            const auto x = random_subset(rng, full);
            xs.push_back(x == 0 ? 1 : x);
        }
    }
    for (auto x : xs) {
        add_residual(t, ok, name, sys.describe(x), ks_residual(sys, x, c.model.activities, c.mode));
    }
}

Report command_verify(const Context& c)
{
    const Model& m = c.model;
    m.require_activity();
    std::mt19937_64 rng(c.seed);
    Report r;
    Table t{{"identity", "element", "residual", "zero"}};
    bool ok = true;
    const std::uint64_t region = region_bits(m);
    const bool has_abstract = !m.is_subset() || m.subset_universe->has_abstract();
    if (has_abstract) {
        const auto& u = m.polymers();
        const PolymerSet fam = m.is_subset() ? m.subset_universe->polymers_within(SiteSet::from_bits(region))
                                             : PolymerSet::from_bits(region);
        for (auto g : fam.members()) {
            const PolymerSet rest = fam.without(g);
            add_residual(t, ok, "fundamental", u.id(g) + " into " + label(u.ids(), rest.bits()),
                         fundamental_identity_residual(u, rest, g, m.activities, c.mode));
            for (int i = 0; i < kRandomDraws / 2; ++i) {
                const PolymerSet z = PolymerSet::from_bits(random_subset(rng, rest.bits()));
                add_residual(t, ok, "fundamental", u.id(g) + " into " + label(u.ids(), z.bits()),
                             fundamental_identity_residual(u, z, g, m.activities, c.mode));
            }
        }
        const auto order = fam.members();
        try {
            add_residual(t, ok, "theta-telescope", label(u.ids(), fam.bits()),
                         telescope_residual(u, fam, order, m.activities, c.mode));
            for (int i = 0; i < kRandomDraws; ++i) {
                const auto x = PolymerSet::from_bits(random_subset(rng, fam.bits()));
                if (x.empty()) {
                    continue;
                }
                const auto fo = x.members();
                add_residual(t, ok, "correlation-telescope", label(u.ids(), x.bits()),
                             correlation_telescope_residual(u, fam, fo, m.activities, c.mode));
            }
        } catch (const NormalizationFailure& e) {
            r.notes.push_back(std::string("telescope skipped: ") + e.what());
        }
        if (!m.is_subset() && fam.size() <= kMaxKsElements) {
            try {
                ks_residual_rows(c, KsSystem::abstract(u, fam), "ks-abstract", t, ok, rng);
            } catch (const NormalizationFailure& e) {
                r.notes.push_back(std::string("abstract KS residuals skipped: ") + e.what());
            }
        }
    }
    if (m.is_subset()) {
        const auto& su = *m.subset_universe;
        const SiteSet lam = SiteSet::from_bits(region);
        for (auto x : lam.members()) {
            const SiteSet rest = lam.without(x);
            add_residual(t, ok, "site-addition", su.site_ids()[x] + " into " + label(su.site_ids(), rest.bits()),
                         site_addition_residual(su, rest, x, m.activities, c.mode));
            for (int i = 0; i < kRandomDraws / 2; ++i) {
                const SiteSet y = SiteSet::from_bits(random_subset(rng, rest.bits()));
                add_residual(t, ok, "site-addition", su.site_ids()[x] + " into " + label(su.site_ids(), y.bits()),
                             site_addition_residual(su, y, x, m.activities, c.mode));
            }
        }
        for (int i = 0; i < kRandomDraws; ++i) {
            auto bits = random_subset(rng, lam.bits());
            if (bits == 0) {
                bits = std::uint64_t{1} << lam.front();
            }
            const SiteSet x = SiteSet::from_bits(bits);
            add_residual(t, ok, "site-deletion", label(su.site_ids(), bits),
                         site_deletion_residual(su, lam, x, m.activities, c.mode));
        }
        // Theta telescope over sites: prod_i Xi_{L_i}/Xi_{L_{i-1}} = Xi_L.
        try {
            const auto members = lam.members();
            GasValue product = c.mode == Mode::Exact ? GasValue(Rational(1)) : GasValue(1.0);
            SiteSet grown;
            for (auto x : members) {
                const GasValue before = region_partition_function(su, grown, m.activities, c.mode);
                grown.insert(x);
                const GasValue after = region_partition_function(su, grown, m.activities, c.mode);
                if (before.is_zero()) {
                    throw NormalizationFailure("intermediate partition function vanishes");
                }
                product = product.is_exact() ? GasValue(Rational(product.exact() * after.exact() / before.exact()))
                                             : GasValue(product.approx() * after.approx() / before.approx());
            }
            add_residual(t, ok, "site-theta-telescope", label(su.site_ids(), lam.bits()),
                         difference(product, region_partition_function(su, lam, m.activities, c.mode)));
        } catch (const NormalizationFailure& e) {
            r.notes.push_back(std::string("site telescope skipped: ") + e.what());
        }
        if (lam.size() <= kMaxKsElements) {
            try {
                ks_residual_rows(c, KsSystem::subset(su, lam), "ks-subset", t, ok, rng);
            } catch (const NormalizationFailure& e) {
                r.notes.push_back(std::string("subset KS residuals skipped: ") + e.what());
            }
        }
    }
    r.tables["report"] = std::move(t);
    r.status = ok ? 0 : 2;
    return r;
}

// radius-opt -------------------------------------------------------------

Report command_radius(const Context& c)
{
    const Model& m = c.model;
    std::vector<CriterionKind> kinds;
    if (c.kind) {
        kinds.push_back(*c.kind);
    } else {
        kinds = {CriterionKind::Dobrushin, CriterionKind::FP, CriterionKind::KP};
        if (m.is_subset()) {
            kinds.push_back(CriterionKind::ExtGK);
        }
    }
    Report r;
    Table t{{"kind", "radius", "argmax", "argmax_kind", "at_cap"}};
    for (auto k : kinds) {
        const RadiusResult res = m.is_subset() ? optimize_uniform_weight(*m.subset_universe, k)
                                               : optimize_uniform_weight(*m.abstract_universe, k);
        const bool mu_scale = k == CriterionKind::Dobrushin || k == CriterionKind::FP;
        t.add({to_string(k), fmt(res.radius), fmt(res.argmax), mu_scale ? "mu" : "a", res.at_cap ? "true" : "false"});
        if (res.at_cap) {
            r.notes.push_back(to_string(k) + ": maximum at the search cap; the radius is a boundary value");
        }
    }
    r.tables["report"] = std::move(t);
    return r;
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"xi",      "theta",   "criteria",          "bounds",     "ks-iterate",
                                                "neumann", "compare", "verify-identities", "radius-opt"};
    return names;
}

Report compute_command(const std::string& command, const Model& model, const RunOptions& options)
{
    const Context c{model,
                    options.mode.value_or(model.mode),
                    options.seed.value_or(model.spec.run.seed),
                    options.max_order.value_or(model.spec.run.max_order),
                    options.ks_steps.value_or(model.spec.run.ks_steps),
                    options.kind};
    Report r;
    if (command == "xi") {
        r = command_xi(c);
    } else if (command == "theta") {
        r = command_theta(c);
    } else if (command == "criteria" || command == "bounds" || command == "compare") {
        r = command_criteria(c, command);
    } else if (command == "ks-iterate") {
        r = command_ks_iterate(c);
    } else if (command == "neumann") {
        r = command_neumann(c);
    } else if (command == "verify-identities") {
        r = command_verify(c);
    } else if (command == "radius-opt") {
        r = command_radius(c);
    } else {
        throw InvalidArgument("unknown command '" + command + "'");
    }
    r.command = command;
    r.mode = std::string(to_string(c.mode));
    r.seed = c.seed;
    r.model = options.model_path;
    return r;
}

int run(const std::string& command, const ModelSpec& spec, const RunOptions& options,
        const std::filesystem::path& out)
{
    try {
        const Model model = build_model(spec);
        if (command != "run") {
            const Report r = compute_command(command, model, options);
            write_report(r, out);
            return r.status;
        }
        if (spec.run.commands.empty()) {
            throw InvalidArgument("[run] commands is empty");
        }
        int status = 0;
        for (const auto& c : spec.run.commands) {
            const Report r = compute_command(c, model, options);
            write_report(r, out / c);
            status = std::max(status, r.status);
        }
        return status;
    } catch (const PrecheckFailure& e) {
        std::cerr << "error: precheck failed at '" << e.element() << "': " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace polygas
