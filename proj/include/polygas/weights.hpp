#pragma once

#include "polygas/index_set.hpp"
#include "polygas/numeric.hpp"

#include <span>
#include <vector>

namespace polygas {

enum class WeightScope { PerPolymer, PerSite };

/// The parametrization the caller supplied; conversions between them are exact
/// where the arithmetic allows it.
enum class WeightForm { Mu, Exponent, Xi };

/// Free majorizing parameters. Per-polymer families store mu >= 0 with
/// xi = 1 + mu and a = log(1 + mu). Per-site (factorized) families store
/// xi_x >= 1 with a_x = log xi_x and xi^X = prod over x in X of xi_x.
class WeightFamily {
public:
    static WeightFamily polymer_mu(std::vector<Rational> mu);
    /// mu = e^a - 1.
    static WeightFamily polymer_exponent(std::span<const double> a);
    /// mu = xi - 1; requires xi >= 1.
    static WeightFamily polymer_xi(std::vector<Rational> xi);
    /// xi_x = e^{a_x}.
    static WeightFamily site_exponent(std::span<const double> a);
    static WeightFamily site_xi(std::vector<Rational> xi);
    /// The common choice a_x = a for every site.
    static WeightFamily uniform_site_exponent(std::size_t sites, double a);

    WeightScope scope() const { return scope_; }
    WeightForm form() const { return form_; }
    std::size_t size() const { return values_.size(); }

    /// Per-polymer mu. Throws InvalidArgument for per-site families.
    const std::vector<Rational>& mu() const;
    /// Per-polymer xi = 1 + mu.
    std::vector<Rational> polymer_xi() const;
    /// Per-polymer a = log(1 + mu).
    std::vector<double> polymer_exponents() const;

    /// Per-site xi. Throws InvalidArgument for per-polymer families.
    const std::vector<Rational>& site_xi() const;
    std::vector<double> site_exponents() const;

    /// True when every entry is equal.
    bool is_uniform() const;

    /// prod over x in the region of xi_x (per-site families only).
    Rational site_product(SiteSet region) const;

    /// The same family re-expressed in another form (per-polymer: mu, a, xi;
    /// per-site: a, xi).
    WeightFamily reparametrized(WeightForm form) const;

private:
    WeightFamily(WeightScope scope, WeightForm form, std::vector<Rational> values);

    WeightScope scope_ = WeightScope::PerPolymer;
    WeightForm form_ = WeightForm::Mu;
    std::vector<Rational> values_; // mu (per polymer) or xi (per site)
};

} // namespace polygas
