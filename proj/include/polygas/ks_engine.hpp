#pragma once

#include "polygas/numeric.hpp"
#include "polygas/subset_gas.hpp"
#include "polygas/universe.hpp"
#include "polygas/weights.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polygas {

enum class KsKind { Subset, Abstract };

/// Distinct arguments X a region function may hold: 2^16.
inline constexpr std::size_t kMaxKsElements = 16;

/// A function on the nonempty subsets X of a region, stored densely by local
/// mask (bit i = i-th element of the region in universe order). Entry 0 is
/// unused.
template <class T>
class RegionFunction {
public:
    RegionFunction() = default;
    explicit RegionFunction(std::size_t elements) : elements_(elements), values_(std::size_t{1} << elements, T(0)) {}

    std::size_t elements() const { return elements_; }
    std::size_t table_size() const { return values_.size(); }
    T& operator[](std::uint64_t mask) { return values_[mask]; }
    const T& operator[](std::uint64_t mask) const { return values_[mask]; }
    const std::vector<T>& values() const { return values_; }

private:
    std::size_t elements_ = 0;
    std::vector<T> values_;
};

/// The Kirkwood-Salzburg operator on one finite region. For every pivot
/// element (the first member of X) it lists the terms
/// z_t f(X u extend_t), restricted to extend_t disjoint from X when
/// `disjoint` is set.
///   subset:   pivot x1, one term per support {x1} u S inside the region,
///             extend = S, disjoint; activities of equal supports add up.
///   abstract: pivot g0, one term with extend = Gamma*(g0) inside the region.
class KsSystem {
public:
    struct Term {
        std::uint64_t extend = 0; ///< local mask
        std::vector<std::size_t> polymers;
        bool disjoint = false;
    };

    static KsSystem subset(const SubsetUniverse& universe, SiteSet region);
    static KsSystem abstract(const PolymerUniverse& universe, PolymerSet region);

    KsKind kind() const { return kind_; }
    std::size_t elements() const { return members_.size(); }
    std::size_t table_size() const { return std::size_t{1} << members_.size(); }
    const std::vector<std::size_t>& members() const { return members_; }
    std::uint64_t region_bits() const { return region_; }
    const std::vector<Term>& terms(std::size_t local_pivot) const { return terms_.at(local_pivot); }

    std::uint64_t to_local(std::uint64_t global) const;
    std::uint64_t to_global(std::uint64_t local) const;
    /// "{a,b}" with the element ids.
    std::string describe(std::uint64_t local) const;
    std::string element_id(std::size_t local) const;

    const SubsetUniverse* subset_universe() const { return subset_; }
    const PolymerUniverse* abstract_universe() const { return abstract_; }

private:
    KsKind kind_ = KsKind::Subset;
    std::uint64_t region_ = 0;
    std::vector<std::size_t> members_;
    std::vector<std::vector<Term>> terms_;
    const SubsetUniverse* subset_ = nullptr;
    const PolymerUniverse* abstract_ = nullptr;
};

/// (K_z f)(X) = 1{|X|>=2} f(X minus pivot) - sum_t z_t f(X u extend_t).
/// `z` is indexed by universe polymer.
template <class T>
RegionFunction<T> ks_apply(const KsSystem& system, const RegionFunction<T>& f, std::span<const T> z);

/// alpha(X) = 1{|X| = 1}.
template <class T>
RegionFunction<T> ks_alpha(const KsSystem& system);

/// (T_rho f) = alpha + K_{-rho} f.
template <class T>
RegionFunction<T> t_apply(const KsSystem& system, const RegionFunction<T>& f, std::span<const T> rho);

/// xi^X = prod over members of X of xi; `xi` indexed by site (subset) or polymer (abstract).
template <class T>
RegionFunction<T> factorized_function(const KsSystem& system, std::span<const T> xi);

/// Xi_X(w) for every X, the non-factorized candidate for the probes.
template <class T>
RegionFunction<T> partition_candidate(const KsSystem& system, std::span<const T> w);

/// Xi_{L\X}(z) / Xi_L(z) for every nonempty X. NormalizationFailure when Xi_L(z) = 0.
template <class T>
RegionFunction<T> exact_ratios(const KsSystem& system, std::span<const T> z);

/// sum_{n=0}^{k} (K_{-rho})^n alpha, evaluated for k = 0..max_k at `tracked`
/// (local masks): result[k][i].
template <class T>
std::vector<std::vector<T>> neumann_partials(const KsSystem& system, std::span<const T> rho, int max_k,
                                             std::span<const std::uint64_t> tracked);

/// Margins of the factorized start condition, per region element:
///   subset:   (xi_x - 1) - sum over g containing x of rho_g xi^g
///   abstract: (xi_g - 1) - rho_g prod over Gamma(g) of xi
/// Sums run over the whole universe.
std::vector<std::pair<std::string, GasValue>> ks_precheck(const KsSystem& system, const ActivityMap& activities,
                                                          const WeightFamily& weights, Mode mode);

struct KsTraceRow {
    int iteration = 0;
    std::uint64_t local = 0;
    std::string label;
    GasValue value;
    GasValue exact;
};

struct KsTrace {
    std::vector<std::pair<std::string, GasValue>> precheck;
    std::vector<KsTraceRow> rows;
    /// T xi0 <= xi0 on every X.
    bool start_ok = false;
    /// T^k xi0 <= T^{k-1} xi0 on every X and k.
    bool monotone = false;
    /// T^k xi0 >= exact ratio on every X and k.
    bool dominated = false;
};

/// Iterates T_rho from the factorized xi0 over `steps` steps, recording the
/// tracked X (local masks; all X when empty and the region has at most 10
/// elements, singletons otherwise). Verdicts cover every X. Tolerance 0 in
/// exact mode, 1e-9 relative in float mode. PrecheckFailure when the start
/// condition fails somewhere.
KsTrace t_iterate(const KsSystem& system, const ActivityMap& activities, const WeightFamily& weights, int steps,
                  std::vector<std::uint64_t> tracked, Mode mode);

struct NormBound {
    GasValue norm;
    bool contraction = false;
    /// (1 - norm)^{-1} when the operator contracts.
    std::optional<GasValue> solution_bound;
};

/// sup_x xi_x^{-1} [1 + sup_x sum over g containing x of |z_g| xi^g].
NormBound ks_norm_bound(const SubsetUniverse& universe, const ActivityMap& activities,
                        const WeightFamily& site_weights, Mode mode);
/// sup_g xi_g^{-1} [1 + |z_g| prod over Gamma(g) of xi], xi = 1 + mu.
NormBound ks_norm_bound(const PolymerUniverse& universe, const ActivityMap& activities, const WeightFamily& mu,
                        Mode mode);

/// phi(X) - phi(X minus pivot) + sum_t z_t phi(X u extend_t) for the exact
/// reduced correlations at the signed activities, phi(empty) = 1.
GasValue ks_residual(const KsSystem& system, std::uint64_t local, const ActivityMap& activities, Mode mode);

struct NecessaryRow {
    std::string element;
    GasValue lhs; ///< 1 + rho_g0 xi(Gamma_L(g0))
    GasValue rhs; ///< xi({g0})
    bool holds = false;
};

/// The necessary condition for T xi <= xi, per abstract pivot g0.
template <class T>
std::vector<NecessaryRow> necessary_condition_probe(const KsSystem& system, const RegionFunction<T>& xi,
                                                    std::span<const T> rho);

struct SupersolutionProbe {
    bool holds = false;
    std::uint64_t worst = 0;
    double worst_excess = 0; ///< max over X of (T xi)(X) - xi(X)
};

/// Tests T xi <= xi on every X for a possibly non-factorized xi.
template <class T>
SupersolutionProbe supersolution_probe(const KsSystem& system, const RegionFunction<T>& xi, std::span<const T> rho);

} // namespace polygas
