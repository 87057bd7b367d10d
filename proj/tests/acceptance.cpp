// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "polygas/criteria.hpp"
#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"
#include "polygas/ks_engine.hpp"
#include "polygas/subset_gas.hpp"
#include "polygas/ursell.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace polygas;
using oracle::q;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Counts checks and keeps the first failure for the report line.
struct Tally {
    long checks = 0;
    long failures = 0;
    std::string first;

    void expect(bool ok, const std::string& what)
    {
        ++checks;
        if (!ok) {
            if (failures == 0) {
                first = what;
            }
            ++failures;
        }
    }
    bool ok() const { return failures == 0; }
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string summary(const Tally& t, double seconds, const std::string& extra = {})
{
    std::ostringstream out;
    out << t.checks << " checks, " << t.failures << " failed";
    if (!extra.empty()) {
        out << ", " << extra;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, ", %.2f s", seconds);
    out << buf;
    if (!t.ok()) {
        out << "; first failure: " << t.first;
    }
    return out.str();
}

std::uint64_t random_subset(std::mt19937_64& rng, std::uint64_t of)
{
    return rng() & of;
}

std::vector<Rational> absolute(const std::vector<Rational>& z)
{
    std::vector<Rational> out;
    for (const auto& x : z) {
        out.push_back(abs(x));
    }
    return out;
}

/// exact = alpha + K_z exact on every X, and the library residual on a sample.
void ks_equations(Tally& t, const KsSystem& sys, const std::vector<Rational>& z, std::mt19937_64& rng,
                  const std::string& tag)
{
    const std::span<const Rational> zs(z);
    const auto ex = exact_ratios<Rational>(sys, zs);
    const auto alpha = ks_alpha<Rational>(sys);
    const auto kx = ks_apply<Rational>(sys, ex, zs);
    bool all = true;
    for (std::uint64_t x = 1; x < sys.table_size(); ++x) {
        all = all && ex[x] == alpha[x] + kx[x];
    }
    t.expect(all, tag + " equations");
    const auto act = fixture::at(z);
    std::uniform_int_distribution<std::uint64_t> pick(1, sys.table_size() - 1);
    for (int i = 0; i < 6; ++i) {
        const auto x = pick(rng);
        t.expect(ks_residual(sys, x, act, Mode::Exact).is_zero(), tag + " residual at " + sys.describe(x));
    }
}

// 1 -------------------------------------------------------------------------

Outcome identity_suite()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    Tally t;
    for (int inst = 0; inst < 200; ++inst) {
        // Abstract gas, at most 10 polymers.
        const std::size_t n = 1 + inst % 10;
        const auto adj = oracle::random_graph(rng, n, 0.35);
        const auto u = fixture::universe(adj);
        auto z = oracle::random_activities(rng, n, -3, 3, 7);
        while (oracle::independence_polynomial(adj, u.all().bits(), z) == 0) {
            z = oracle::random_activities(rng, n, -3, 3, 7);
        }
        const auto act = fixture::at(z);
        t.expect(partition_function(u, u.all(), act, Mode::Exact).exact() ==
                     oracle::independence_polynomial(adj, u.all().bits(), z),
                 "abstract partition function");
        for (std::size_t g0 = 0; g0 < n; ++g0) {
            const auto family = PolymerSet::from_bits(random_subset(rng, u.all().without(g0).bits()));
            t.expect(fundamental_identity_residual(u, family, g0, act, Mode::Exact).is_zero(), "fundamental identity");
            t.expect(fundamental_identity_residual(u, u.all().without(g0), g0, act, Mode::Exact).is_zero(),
                     "fundamental identity, full family");
        }
        ks_equations(t, KsSystem::abstract(u, u.all()), z, rng, "abstract KS");

        const auto positive = fixture::at(absolute(z));
        std::vector<PolymerIndex> order(n);
        std::iota(order.begin(), order.end(), PolymerIndex{0});
        std::shuffle(order.begin(), order.end(), rng);
        t.expect(telescope_residual(u, u.all(), order, positive, Mode::Exact).is_zero(), "theta telescope");
        const auto family = std::vector<PolymerIndex>(order.begin(), order.begin() + static_cast<long>(1 + n / 2));
        t.expect(correlation_telescope_residual(u, u.all(), family, positive, Mode::Exact).is_zero(),
                 "correlation telescope");

        // Subset gas, at most 8 sites.
        const std::size_t sites = 1 + inst % 8;
        const auto masks = oracle::random_supports(rng, sites, 1 + inst % 12, 3);
        auto c = fixture::subset_case(sites, masks, oracle::random_activities(rng, masks.size(), -3, 3, 7));
        const std::uint64_t all_sites = c.universe.all_sites().bits();
        while (oracle::subset_partition(c.supports, all_sites, c.z) == 0) {
            c = fixture::subset_case(sites, masks, oracle::random_activities(rng, masks.size(), -3, 3, 7));
        }
        const auto& su = c.universe;
        const auto sact = fixture::at(c.z);
        t.expect(region_partition_function(su, su.all_sites(), sact, Mode::Exact).exact() ==
                     oracle::subset_partition(c.supports, all_sites, c.z),
                 "subset partition function");
        for (std::size_t x = 0; x < sites; ++x) {
            const auto rest = su.all_sites().without(x);
            t.expect(site_addition_residual(su, rest, x, sact, Mode::Exact).is_zero(), "site addition");
            const auto y = SiteSet::from_bits(random_subset(rng, rest.bits()));
            t.expect(site_addition_residual(su, y, x, sact, Mode::Exact).is_zero(), "site addition, random base");
        }
        for (int i = 0; i < 4; ++i) {
            auto removed = random_subset(rng, all_sites);
            removed = removed == 0 ? 1 : removed;
            t.expect(site_deletion_residual(su, su.all_sites(), SiteSet::from_bits(removed), sact, Mode::Exact)
                         .is_zero(),
                     "site deletion");
        }
        ks_equations(t, KsSystem::subset(su, su.all_sites()), c.z, rng, "subset KS");

        // Site telescope: the Theta arguments multiply back to Xi.
        const auto spos = fixture::at(absolute(c.z));
        std::vector<std::size_t> site_order(sites);
        std::iota(site_order.begin(), site_order.end(), std::size_t{0});
        std::shuffle(site_order.begin(), site_order.end(), rng);
        Rational product = 1;
        SiteSet region = su.all_sites();
        for (auto x : site_order) {
            product *= site_theta(su, region, x, spos, SeriesMode::Signed, Mode::Exact).argument.exact();
            region = region.without(x);
        }
        t.expect(product == region_partition_function(su, su.all_sites(), spos, Mode::Exact).exact(),
                 "site theta telescope");
    }
    const double s = elapsed(start);
    return {t.ok() && s < 60, summary(t, s, "200 instances, limit 60 s")};
}

// 2 -------------------------------------------------------------------------

/// Smallest adjacency code over all relabellings.
std::uint32_t canonical_code(const oracle::Adjacency& adj)
{
    const std::size_t m = adj.size();
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::uint32_t best = ~0u;
    do {
        std::uint32_t code = 0;
        int bit = 0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j, ++bit) {
                if (adj[perm[i]][perm[j]]) {
                    code |= 1u << bit;
                }
            }
        }
        best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Outcome alternating_sign()
{
    const auto start = Clock::now();
    Tally t;
    std::size_t classes = 0;
    for (std::size_t m = 1; m <= 4; ++m) {
        const std::size_t pairs = m * (m - 1) / 2;
        std::set<std::uint32_t> seen;
        for (std::uint32_t code = 0; code < (1u << pairs); ++code) {
            oracle::Adjacency adj(m, std::vector<bool>(m, false));
            int bit = 0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i + 1; j < m; ++j, ++bit) {
                    adj[i][j] = adj[j][i] = ((code >> bit) & 1u) != 0;
                }
            }
            if (!seen.insert(canonical_code(adj)).second) {
                continue;
            }
            ++classes;
            const auto u = fixture::universe(adj);
            for (std::size_t len = 1; len <= 5; ++len) {
                std::vector<std::size_t> tuple(len, 0);
                while (true) {
                    const Rational got = ursell_coefficient(u, tuple);
                    const int sign = len % 2 == 1 ? 1 : -1;
                    t.expect(got == 0 || sgn(got) == sign, "sign at length " + std::to_string(len));
                    const long long want = oracle::connected_edge_sum(len, oracle::tuple_edges(adj, tuple));
                    t.expect(got == Rational(static_cast<long>(want)), "edge-subset oracle");
                    std::size_t i = 0;
                    while (i < len && ++tuple[i] == m) {
                        tuple[i++] = 0;
                    }
                    if (i == len) {
                        break;
                    }
                }
            }
        }
    }
    const double s = elapsed(start);
    return {t.ok() && classes == 18 && s < 120,
            summary(t, s, std::to_string(classes) + " graph classes, tuples up to length 5, limit 120 s")};
}

// 3 -------------------------------------------------------------------------

Outcome soundness()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(303);
    Tally t;
    int d_holds = 0, fp_holds = 0;
    double worst = -1e300;
    for (int inst = 0; inst < 500; ++inst) {
        const std::size_t n = 1 + inst % 8;
        const auto u = fixture::universe(oracle::random_graph(rng, n, 0.4));
        const auto mu_v = oracle::random_activities(rng, n, 1, 30, 10);
        const auto mu = WeightFamily::polymer_mu(mu_v);
        // Alternate radii drawn under the D edge and under the FP edge.
        const PhiKind edge = inst % 2 == 0 ? PhiKind::Dobrushin : PhiKind::FP;
        std::vector<Rational> rho;
        for (std::size_t g = 0; g < n; ++g) {
            const auto phi = phi_value(u, g, mu, edge, Mode::Exact).exact();
            rho.push_back(mu_v[g] / phi * oracle::random_rational(rng, 1, 10, 10));
        }
        const auto act = ActivityMap::from_radii(rho);
        for (auto kind : {CriterionKind::Dobrushin, CriterionKind::FP}) {
            auto rep = check_criterion(u, act, mu, kind, Mode::Exact);
            if (!rep.holds) {
                continue;
            }
            (kind == CriterionKind::Dobrushin ? d_holds : fp_holds) += 1;
            attach_bounds(rep, u, act, mu, Mode::Exact);
            for (const auto& b : rep.bounds) {
                t.expect(b.exact.has_value() && !b.flagged, to_string(b.kind) + " has no exact counterpart");
                if (b.exact) {
                    t.expect(*b.exact <= b.value + 1e-9, to_string(b.kind) + " at " + b.element);
                }
            }
            if (kind == CriterionKind::Dobrushin) {
                for (std::size_t g = 0; g < n; ++g) {
                    const double lovasz = bound_value(u, g, act, mu, BoundKind::Lovasz);
                    const double dobo = bound_value(u, g, act, mu, BoundKind::DoBo);
                    t.expect(lovasz <= dobo + 1e-9, "lovasz <= do.bo by " + std::to_string(lovasz - dobo));
                    worst = std::max(worst, lovasz - dobo);
                }
            }
        }
    }
    const double s = elapsed(start);
    char gap[48];
    std::snprintf(gap, sizeof gap, "%.3g", worst);
    return {t.ok() && d_holds >= 200 && fp_holds >= 400,
            summary(t, s, std::to_string(d_holds) + " D and " + std::to_string(fp_holds) + " FP instances, max lovasz - do.bo " + gap)};
}

// 4 -------------------------------------------------------------------------

Outcome sharpness()
{
    const auto start = Clock::now();
    Tally t;
    const auto one = SubsetUniverse::all_subsets({"x"}, 1);
    const auto w = WeightFamily::site_exponent(std::vector<double>{1.0});
    const Rational xi = w.site_xi()[0];
    const auto act = ActivityMap::from_radii({(xi - 1) / xi});
    const double e = std::exp(1.0);
    t.expect(std::abs(to_double(act.radii()[0]) - (1 - 1 / e)) < 1e-15, "rho = 1 - 1/e");

    const auto ext = check_criterion(one, act, w, CriterionKind::ExtGK, Mode::Exact);
    t.expect(ext.holds, "ExtGK holds");
    t.expect(ext.entries.at(0).margin.is_zero(), "ExtGK margin is zero");
    t.expect(!check_criterion(one, act, w, CriterionKind::GKStrict, Mode::Exact).holds, "GK-strict fails");

    const ActivityMap at_minus(act.negated_radii_as<Rational>(), act.radii());
    const Rational empty = region_partition_function(one, SiteSet{}, at_minus, Mode::Exact).exact();
    const Rational full = region_partition_function(one, one.all_sites(), at_minus, Mode::Exact).exact();
    const Rational ratio = empty / full;
    t.expect(std::abs(to_double(ratio) - e) < 1e-12, "ratio is e");

    const auto sys = KsSystem::subset(one, one.all_sites());
    const auto trace = t_iterate(sys, act, w, 6, {}, Mode::Exact);
    t.expect(trace.start_ok && trace.monotone && trace.dominated, "iteration verdicts");
    for (const auto& row : trace.rows) {
        t.expect(row.value.exact() == xi, "iterate stays at xi");
        t.expect(row.exact.exact() == ratio, "exact ratio equals xi");
    }
    const double s = elapsed(start);
    return {t.ok(), summary(t, s)};
}

// 5 -------------------------------------------------------------------------

struct ChainCase {
    KsSystem system;
    ActivityMap activities;
    WeightFamily weights;
    std::vector<Rational> xi; ///< per element of the system's universe
};

/// Radii under the factorized start condition, scaled by a random factor in (0, 1].
ChainCase abstract_chain_case(const PolymerUniverse& u, std::mt19937_64& rng)
{
    const std::size_t n = u.size();
    const auto mu_v = oracle::random_activities(rng, n, 1, 20, 10);
    const auto mu = WeightFamily::polymer_mu(mu_v);
    std::vector<Rational> rho;
    for (std::size_t g = 0; g < n; ++g) {
        rho.push_back(mu_v[g] / phi_value(u, g, mu, PhiKind::Dobrushin, Mode::Exact).exact() *
                      oracle::random_rational(rng, 1, 8, 8));
    }
    return {KsSystem::abstract(u, u.all()), ActivityMap::from_radii(rho), mu, mu.polymer_xi()};
}

ChainCase subset_chain_case(const SubsetUniverse& su, std::mt19937_64& rng)
{
    std::vector<Rational> xi;
    for (std::size_t i = 0; i < su.site_count(); ++i) {
        xi.push_back(oracle::random_rational(rng, 11, 25, 10));
    }
    const auto w = WeightFamily::site_xi(xi);
    auto rho = criterion_edge_radii(su, w);
    for (auto& r : rho) {
        r *= oracle::random_rational(rng, 1, 8, 8);
    }
    return {KsSystem::subset(su, su.all_sites()), ActivityMap::from_radii(rho), w, xi};
}

Outcome ks_chain()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(505);
    Tally t;
    int contracting = 0;
    double worst_gap = -1;
    for (int inst = 0; inst < 100; ++inst) {
        std::optional<PolymerUniverse> au;
        std::optional<SubsetUniverse> su;
        ChainCase c = [&] {
            if (inst % 2 == 0) {
                au = fixture::universe(oracle::random_graph(rng, 2 + inst % 6, 0.4));
                return abstract_chain_case(*au, rng);
            }
            const std::size_t sites = 2 + inst % 5;
            su = fixture::subset_case(sites, oracle::random_supports(rng, sites, 2 + inst % 7, 3),
                                      std::vector<Rational>(2 + inst % 7, 0))
                     .universe;
            return subset_chain_case(*su, rng);
        }();
        const auto& sys = c.system;
        const std::string tag = std::string(inst % 2 == 0 ? "abstract" : "subset") + " #" + std::to_string(inst);

        for (const auto& [id, margin] : ks_precheck(sys, c.activities, c.weights, Mode::Exact)) {
            t.expect(margin.exact() >= 0, tag + " precheck at " + id);
        }

        // Chain exact <= T^k xi0 <= T^{k-1} xi0, k = 0..6, on every X, in exact arithmetic.
        const auto rho = c.activities.radii();
        const std::span<const Rational> rs(rho);
        const auto minus = c.activities.negated_radii_as<Rational>();
        const auto exact = exact_ratios<Rational>(sys, std::span<const Rational>(minus));
        std::vector<RegionFunction<Rational>> iterates{factorized_function<Rational>(sys, c.xi)};
        for (int k = 1; k <= 7; ++k) {
            iterates.push_back(t_apply<Rational>(sys, iterates.back(), rs));
        }
        bool chain = true;
        for (int k = 0; k <= 6; ++k) {
            for (std::uint64_t x = 1; x < sys.table_size(); ++x) {
                chain = chain && exact[x] <= iterates[k][x];
                if (k > 0) {
                    chain = chain && iterates[k][x] <= iterates[k - 1][x];
                }
            }
        }
        t.expect(chain, tag + " chain");
        const auto trace = t_iterate(sys, c.activities, c.weights, 6, {}, Mode::Exact);
        t.expect(trace.start_ok && trace.monotone && trace.dominated, tag + " iteration verdicts");

        // Neumann partials: nondecreasing, under T^{k+1} xi0 (exact for k <= 6).
        std::vector<std::uint64_t> every(sys.table_size() - 1);
        std::iota(every.begin(), every.end(), std::uint64_t{1});
        const auto pq = neumann_partials<Rational>(sys, rs, 6, every);
        bool bracket = true;
        for (int k = 0; k <= 6; ++k) {
            for (std::size_t i = 0; i < every.size(); ++i) {
                bracket = bracket && pq[k][i] <= iterates[k + 1][every[i]];
                if (k > 0) {
                    bracket = bracket && pq[k - 1][i] <= pq[k][i];
                }
            }
        }
        t.expect(bracket, tag + " neumann bracket");

        const auto norm = sys.kind() == KsKind::Abstract
                              ? ks_norm_bound(*au, c.activities, c.weights, Mode::Exact)
                              : ks_norm_bound(*su, c.activities, c.weights, Mode::Exact);
        if (!norm.contraction) {
            continue;
        }
        ++contracting;
        const double norm_value = norm.norm.approx();
        const auto rd = c.activities.radii_as<double>();
        const auto partials = neumann_partials<double>(sys, std::span<const double>(rd), 200, every);
        const auto xi0 = factorized_function<Rational>(sys, c.xi);
        // Errors in the xi-weighted sup norm the operator bound refers to.
        std::vector<double> err;
        for (const auto& row : partials) {
            double e = 0;
            for (std::size_t i = 0; i < every.size(); ++i) {
                const double ex = to_double(exact[every[i]]);
                e = std::max(e, std::abs(row[i] - ex) / to_double(xi0[every[i]]));
            }
            err.push_back(e);
        }
        int reached = -1;
        for (std::size_t k = 0; k < partials.size(); ++k) {
            double diff = 0;
            for (std::size_t i = 0; i < every.size(); ++i) {
                diff = std::max(diff, std::abs(partials[k][i] - to_double(exact[every[i]])));
            }
            if (diff < 1e-9) {
                reached = static_cast<int>(k);
                break;
            }
        }
        t.expect(reached >= 0, tag + " neumann convergence within 200 steps");
        bool monotone = true;
        for (std::size_t k = 1; k < partials.size(); ++k) {
            for (std::size_t i = 0; i < every.size(); ++i) {
                monotone = monotone && partials[k][i] >= partials[k - 1][i] - 1e-12 * std::abs(partials[k][i]);
            }
        }
        t.expect(monotone, tag + " float partials nondecreasing");
        // Geometric rate between step 1 and the last step above the rounding floor.
        std::size_t last = 1;
        while (last + 1 < err.size() && err[last + 1] > 1e-12) {
            ++last;
        }
        if (last > 1 && err[1] > 0) {
            const double rate = std::pow(err[last] / err[1], 1.0 / static_cast<double>(last - 1));
            worst_gap = std::max(worst_gap, rate - norm_value);
            t.expect(rate <= norm_value + 0.01, tag + " rate " + std::to_string(rate) + " vs norm " +
                                                     std::to_string(norm_value));
        }
    }
    const double s = elapsed(start);
    char gap[64];
    std::snprintf(gap, sizeof gap, "max rate - norm %.4f", worst_gap);
    return {t.ok() && contracting >= 20,
            summary(t, s, "100 instances, " + std::to_string(contracting) + " contracting, " + gap)};
}

// 6 -------------------------------------------------------------------------

Outcome radius_oracle()
{
    const auto start = Clock::now();
    Tally t;
    const auto c9 = fixture::cycle(9);
    const auto d = optimize_uniform_weight(c9, CriterionKind::Dobrushin);
    t.expect(std::abs(d.radius - 4.0 / 27) < 1e-6, "D radius " + std::to_string(d.radius));
    t.expect(std::abs(d.argmax - 0.5) < 1e-4, "D argmax " + std::to_string(d.argmax));
    const auto fp = optimize_uniform_weight(c9, CriterionKind::FP);
    t.expect(std::abs(fp.radius - 0.2) < 1e-6, "FP radius " + std::to_string(fp.radius));
    t.expect(std::abs(fp.argmax - 1.0) < 1e-4, "FP argmax " + std::to_string(fp.argmax));
    t.expect(d.radius < fp.radius, "D radius below FP radius");

    const auto act = ActivityMap::uniform(9, q(1, 5), q(1, 5));
    const ActivityMap at_minus(act.negated_radii_as<Rational>(), act.radii());
    const Rational xi = partition_function(c9, c9.all(), at_minus, Mode::Exact).exact();
    t.expect(xi > 0, "Xi(-0.2) > 0");
    std::vector<Rational> minus(9, -q(1, 5));
    oracle::Adjacency adj(9, std::vector<bool>(9, false));
    for (std::size_t i = 0; i < 9; ++i) {
        adj[i][(i + 1) % 9] = adj[(i + 1) % 9][i] = true;
    }
    t.expect(xi == oracle::independence_polynomial(adj, c9.all().bits(), minus), "Xi against the full scan");
    t.expect(radii_in_convergence_region(c9, c9.all(), act), "Xi_W(-0.2) > 0 on every W");
    const auto mu1 = WeightFamily::polymer_mu(std::vector<Rational>(9, 1));
    t.expect(check_criterion(c9, act, mu1, CriterionKind::FP, Mode::Exact).holds, "FP certifies 0.2");
    const auto half = WeightFamily::polymer_mu(std::vector<Rational>(9, q(1, 2)));
    t.expect(!check_criterion(c9, act, half, CriterionKind::Dobrushin, Mode::Exact).holds, "D at 0.2 fails");
    const double s = elapsed(start);
    std::ostringstream extra;
    extra.precision(10);
    extra << "D " << d.radius << " at " << d.argmax << ", FP " << fp.radius << " at " << fp.argmax << ", Xi(-0.2) = "
          << format_rational(xi) << ", limit 10 s";
    return {t.ok() && s < 10, summary(t, s, extra.str())};
}

// 7 -------------------------------------------------------------------------

Outcome ordering()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(707);
    Tally t;
    for (int draw = 0; draw < 1000; ++draw) {
        const std::size_t n = 1 + draw % 9;
        const auto u = fixture::universe(oracle::random_graph(rng, n, 0.45));
        const auto mu_v = oracle::random_activities(rng, n, 0, 30, 10);
        const auto mu = WeightFamily::polymer_mu(mu_v);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const auto g = pick(rng);
        const Rational fp = phi_value(u, g, mu, PhiKind::FP, Mode::Exact).exact();
        const Rational d = phi_value(u, g, mu, PhiKind::Dobrushin, Mode::Exact).exact();
        const double kp = phi_value(u, g, mu, PhiKind::KP, Mode::Float).approx();
        t.expect(fp <= d, "phi FP <= phi D");
        t.expect(to_double(d) <= kp * (1 + 1e-12), "phi D <= phi KP");

        std::vector<Rational> rho;
        for (std::size_t h = 0; h < n; ++h) {
            const auto phi = phi_value(u, h, mu, PhiKind::FP, Mode::Exact).exact();
            rho.push_back(mu_v[h] / phi * oracle::random_rational(rng, 1, 12, 8));
        }
        const auto cmp = compare_criteria(u, ActivityMap::from_radii(rho), mu, Mode::Exact);
        t.expect(cmp.chain_consistent, cmp.violations.empty() ? "chain" : cmp.violations.front());
    }
    const double s = elapsed(start);
    return {t.ok(), summary(t, s, "1000 draws")};
}

// 8 -------------------------------------------------------------------------

Outcome uniformity_probe()
{
    const auto start = Clock::now();
    Tally t;
    const std::size_t n = 9;
    std::vector<std::string> sites;
    for (std::size_t i = 1; i <= n; ++i) {
        sites.push_back(std::to_string(i));
    }
    const std::vector<std::vector<std::string>> nested{
        {"4", "5", "6"}, {"3", "4", "5", "6", "7"}, {"1", "2", "3", "4", "5", "6", "7", "8", "9"}};
    for (std::size_t k = 1; k <= 3; ++k) {
        // Intervals of length up to k, as in the generator.
        std::vector<SubsetUniverse::PolymerSpec> polymers;
        for (std::size_t len = 1; len <= k; ++len) {
            for (std::size_t s = 0; s + len <= n; ++s) {
                SubsetUniverse::PolymerSpec p;
                for (std::size_t i = s; i < s + len; ++i) {
                    p.id += (p.id.empty() ? "" : "+") + sites[i];
                    p.support.push_back(sites[i]);
                }
                polymers.push_back(std::move(p));
            }
        }
        const auto su = SubsetUniverse::build(sites, polymers);
        for (double a : {0.25, 0.5, 1.0}) {
            const auto w = WeightFamily::uniform_site_exponent(n, a);
            const auto act = ActivityMap::from_radii(criterion_edge_radii(su, w));
            const std::string tag = "k=" + std::to_string(k) + " a=" + std::to_string(a);
            const auto ext = check_criterion(su, act, w, CriterionKind::ExtGK, Mode::Exact);
            t.expect(ext.holds, tag + " ExtGK margins >= 0");
            for (const auto& names : nested) {
                const auto region = su.sites_of(names);
                const auto rep = inductive_bound_report(su, region, act, w, Mode::Exact);
                t.expect(rep.criterion_holds && rep.all_verified, tag + " region of " + std::to_string(names.size()));
                for (const auto& r : rep.single_site) {
                    t.expect(r.ratio.exact() <= w.site_xi()[r.removed.front()], tag + " single-site bound");
                }
                for (auto x : region.members()) {
                    const auto th = site_theta(su, region, x, act, SeriesMode::AbsAtRadius, Mode::Exact);
                    t.expect(th.value() <= a + 1e-12, tag + " |Theta| <= a");
                }
            }
        }
    }
    const double s = elapsed(start);
    return {t.ok(), summary(t, s,
                            "finite surrogate: nested regions of 3, 5, 9 sites, k = 1..3, a in {0.25, 0.5, 1}; "
                            "not a proof of the infinite-volume limit")};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"identity suite", identity_suite},
        {"alternating sign of ursell coefficients", alternating_sign},
        {"D and FP bound soundness", soundness},
        {"sharpness at the extended GK edge", sharpness},
        {"KS chain and Neumann partials", ks_chain},
        {"C9 radius optimization", radius_oracle},
        {"criterion ordering", ordering},
        {"region uniformity probe", uniformity_probe},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
