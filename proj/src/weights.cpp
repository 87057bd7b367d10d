#include "polygas/weights.hpp"

#include "polygas/errors.hpp"

#include <cmath>

namespace polygas {

WeightFamily::WeightFamily(WeightScope scope, WeightForm form, std::vector<Rational> values)
    : scope_(scope), form_(form), values_(std::move(values))
{
    for (const auto& v : values_) {
        if (scope_ == WeightScope::PerPolymer && v < 0) {
            throw InvalidArgument("polymer weights mu must be nonnegative");
        }
        if (scope_ == WeightScope::PerSite && v < 1) {
            throw InvalidArgument("site weights xi must be at least 1 (exponents nonnegative)");
        }
    }
}

WeightFamily WeightFamily::polymer_mu(std::vector<Rational> mu)
{
    return WeightFamily(WeightScope::PerPolymer, WeightForm::Mu, std::move(mu));
}

WeightFamily WeightFamily::polymer_exponent(std::span<const double> a)
{
    std::vector<Rational> mu;
    for (double x : a) {
        if (!(x >= 0)) {
            throw InvalidArgument("weight exponents must be nonnegative");
        }
        mu.push_back(rational_from_double(std::expm1(x)));
    }
    return WeightFamily(WeightScope::PerPolymer, WeightForm::Exponent, std::move(mu));
}

WeightFamily WeightFamily::polymer_xi(std::vector<Rational> xi)
{
    for (auto& x : xi) {
        if (x < 1) {
            throw InvalidArgument("polymer weights xi must be at least 1");
        }
        x -= 1;
    }
    return WeightFamily(WeightScope::PerPolymer, WeightForm::Xi, std::move(xi));
}

WeightFamily WeightFamily::site_exponent(std::span<const double> a)
{
    std::vector<Rational> xi;
    for (double x : a) {
        if (!(x >= 0)) {
            throw InvalidArgument("weight exponents must be nonnegative");
        }
        xi.push_back(rational_from_double(std::exp(x)));
    }
    return WeightFamily(WeightScope::PerSite, WeightForm::Exponent, std::move(xi));
}

WeightFamily WeightFamily::site_xi(std::vector<Rational> xi)
{
    return WeightFamily(WeightScope::PerSite, WeightForm::Xi, std::move(xi));
}

WeightFamily WeightFamily::uniform_site_exponent(std::size_t sites, double a)
{
    std::vector<double> as(sites, a);
    return site_exponent(as);
}

const std::vector<Rational>& WeightFamily::mu() const
{
    if (scope_ != WeightScope::PerPolymer) {
        throw InvalidArgument("per-polymer weights requested from a per-site family");
    }
    return values_;
}

std::vector<Rational> WeightFamily::polymer_xi() const
{
    std::vector<Rational> out = mu();
    for (auto& x : out) {
        x += 1;
    }
    return out;
}

std::vector<double> WeightFamily::polymer_exponents() const
{
    std::vector<double> out;
    for (const auto& m : mu()) {
        out.push_back(std::log1p(to_double(m)));
    }
    return out;
}

const std::vector<Rational>& WeightFamily::site_xi() const
{
    if (scope_ != WeightScope::PerSite) {
        throw InvalidArgument("per-site weights requested from a per-polymer family");
    }
    return values_;
}

std::vector<double> WeightFamily::site_exponents() const
{
    std::vector<double> out;
    for (const auto& x : site_xi()) {
        out.push_back(std::log(to_double(x)));
    }
    return out;
}

bool WeightFamily::is_uniform() const
{
    for (const auto& v : values_) {
        if (v != values_.front()) {
            return false;
        }
    }
    return true;
}

Rational WeightFamily::site_product(SiteSet region) const
{
    const auto& xi = site_xi();
    Rational p(1);
    region.for_each([&](std::size_t x) {
        if (x >= xi.size()) {
            throw InvalidArgument("site weight missing for a site of the region");
        }
        p *= xi[x];
    });
    return p;
}

WeightFamily WeightFamily::reparametrized(WeightForm form) const
{
    if (scope_ == WeightScope::PerSite) {
        if (form == WeightForm::Mu) {
            throw InvalidArgument("per-site families have no mu form");
        }
        if (form == WeightForm::Exponent) {
            return site_exponent(site_exponents());
        }
        return site_xi(values_);
    }
    switch (form) {
    case WeightForm::Mu:
        return polymer_mu(values_);
    case WeightForm::Exponent:
        return polymer_exponent(polymer_exponents());
    case WeightForm::Xi:
        return polymer_xi(polymer_xi());
    }
    return *this;
}

} // namespace polygas
