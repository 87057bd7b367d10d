#pragma once

#include "polygas/index_set.hpp"
#include "polygas/numeric.hpp"

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace polygas {

using PolymerIndex = std::size_t;

/// A finite set of polymers with a symmetric, reflexive incompatibility
/// relation. Polymer order is the input order and is never changed; it fixes
/// every "first polymer" pivot downstream. At most 64 polymers.
class PolymerUniverse {
public:
    PolymerUniverse() = default;

    /// Builds the symmetric and reflexive closure of `incompatible_pairs`.
    static PolymerUniverse build(const std::vector<std::string>& ids,
                                 const std::vector<std::pair<std::string, std::string>>& incompatible_pairs);

    /// Same, with pairs given by position.
    static PolymerUniverse from_adjacency(std::vector<std::string> ids,
                                          const std::vector<std::pair<PolymerIndex, PolymerIndex>>& pairs);

    std::size_t size() const { return ids_.size(); }
    PolymerSet all() const { return PolymerSet::first(size()); }

    const std::string& id(PolymerIndex i) const { return ids_.at(i); }
    const std::vector<std::string>& ids() const { return ids_; }
    PolymerIndex index_of(const std::string& id) const;
    PolymerSet set_of(const std::vector<std::string>& ids) const;

    bool incompatible(PolymerIndex a, PolymerIndex b) const { return neighbors_[a].contains(b); }
    bool compatible(PolymerIndex a, PolymerIndex b) const { return !incompatible(a, b); }

    /// Gamma({i}); contains i.
    PolymerSet neighborhood(PolymerIndex i) const { return neighbors_[i]; }
    /// Gamma*(i) = Gamma({i}) minus i.
    PolymerSet punctured_neighborhood(PolymerIndex i) const { return neighbors_[i].without(i); }
    /// Gamma(X) = union of Gamma({g}) over g in X.
    PolymerSet neighborhood(PolymerSet family) const;

    /// True when every pair in the family is compatible.
    bool is_compatible_family(PolymerSet family) const;

    void check_subset(PolymerSet family, const char* what) const;

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, PolymerIndex> index_;
    std::vector<PolymerSet> neighbors_;
};

/// Signed evaluation points z and nonnegative radii rho, one per polymer.
class ActivityMap {
public:
    ActivityMap() = default;
    ActivityMap(std::vector<Rational> values, std::vector<Rational> radii);

    /// z = rho, used when only radii are given.
    static ActivityMap from_radii(std::vector<Rational> radii);
    static ActivityMap uniform(std::size_t n, const Rational& z, const Rational& rho);

    std::size_t size() const { return values_.size(); }
    const std::vector<Rational>& values() const { return values_; }
    const std::vector<Rational>& radii() const { return radii_; }

    /// |z| <= rho componentwise.
    bool inside_polydisc() const;

    template <class T>
    std::vector<T> values_as() const;

    /// The evaluation point z = -rho.
    template <class T>
    std::vector<T> negated_radii_as() const;

    template <class T>
    std::vector<T> radii_as() const;

private:
    std::vector<Rational> values_;
    std::vector<Rational> radii_;
};

template <class T>
std::vector<T> convert_all(std::span<const Rational> xs)
{
    std::vector<T> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(from_rational<T>(x));
    }
    return out;
}

template <class T>
std::vector<T> ActivityMap::values_as() const
{
    return convert_all<T>(values_);
}

template <class T>
std::vector<T> ActivityMap::radii_as() const
{
    return convert_all<T>(radii_);
}

template <class T>
std::vector<T> ActivityMap::negated_radii_as() const
{
    std::vector<T> out = radii_as<T>();
    for (auto& x : out) {
        x = -x;
    }
    return out;
}

} // namespace polygas
