#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

namespace polygas {

using Rational = mpq_class;

/// Arithmetic backend. Exact runs use GMP rationals; float runs use doubles
/// summed in a fixed order.
enum class Mode { Exact, Float };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

template <class T>
inline constexpr bool is_scalar_v = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

/// Nearest double to q (ties to even); mpq_get_d alone truncates.
double to_double(const Rational& q);

template <class T>
T from_rational(const Rational& q)
{
    static_assert(is_scalar_v<T>);
    if constexpr (std::is_same_v<T, double>) {
        return to_double(q);
    } else {
        return q;
    }
}

inline double to_double(double x) { return x; }

template <class T>
int sign_of(const T& x)
{
    if constexpr (std::is_same_v<T, double>) {
        return (x > 0) - (x < 0);
    } else {
        return sgn(x);
    }
}

/// Exact value of the shortest decimal that round-trips to `x`, so that 0.3
/// becomes 3/10 rather than its binary expansion.
Rational rational_from_double(double x);

/// Parses "p/q", an integer, or a decimal with optional exponent.
Rational parse_rational(std::string_view text);

/// Shortest round-trip decimal.
std::string format_double(double x);

/// "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& q);

/// A computed quantity carrying its backend.
class GasValue {
public:
    GasValue() : value_(0.0) {}
    GasValue(double x) : value_(x) {}
    GasValue(Rational q) : value_(std::move(q)) { std::get<Rational>(value_).canonicalize(); }

    template <class T>
    static GasValue of(const T& x)
    {
        if constexpr (std::is_same_v<T, double>) {
            return GasValue(x);
        } else {
            return GasValue(Rational(x));
        }
    }

    Mode mode() const { return is_exact() ? Mode::Exact : Mode::Float; }
    bool is_exact() const { return std::holds_alternative<Rational>(value_); }

    /// Throws InvalidArgument when the value is a float.
    const Rational& exact() const;
    double approx() const;
    bool is_zero() const;

    /// Text form: "p/q" for rationals, shortest decimal for floats.
    std::string str() const;

private:
    std::variant<Rational, double> value_;
};

} // namespace polygas
