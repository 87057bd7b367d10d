#include "polygas/numeric.hpp"

#include "polygas/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>

namespace polygas {

std::string_view to_string(Mode mode)
{
    return mode == Mode::Exact ? "exact" : "float";
}

Mode parse_mode(std::string_view text)
{
    if (text == "exact") {
        return Mode::Exact;
    }
    if (text == "float") {
        return Mode::Float;
    }
    throw InvalidArgument("unknown arithmetic mode '" + std::string(text) + "'");
}

namespace {

mpz_class pow10(long n)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(n));
    return r;
}

Rational parse_decimal(std::string_view text)
{
    std::string s(text);
    std::string mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mantissa = s.substr(0, e);
        char* end = nullptr;
        const std::string exp_text = s.substr(e + 1);
        exponent = std::strtol(exp_text.c_str(), &end, 10);
        if (exp_text.empty() || *end != '\0') {
            throw InvalidArgument("malformed number '" + s + "'");
        }
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        mantissa.erase(0, 1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (char c : mantissa) {
        if (c == '.') {
            if (seen_point) {
                throw InvalidArgument("malformed number '" + s + "'");
            }
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_point) {
                ++frac_digits;
            }
        } else if (c != '_') {
            throw InvalidArgument("malformed number '" + s + "'");
        }
    }
    if (digits.empty()) {
        throw InvalidArgument("malformed number '" + s + "'");
    }
    Rational q{mpz_class(digits, 10)};
    const long shift = exponent - frac_digits;
    if (shift > 0) {
        q *= pow10(shift);
    } else if (shift < 0) {
        q /= pow10(-shift);
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

} // namespace

Rational rational_from_double(double x)
{
    if (!std::isfinite(x)) {
        throw InvalidArgument("non-finite value cannot be made exact");
    }
    return parse_decimal(format_double(x));
}

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && text.front() == ' ') {
        text.remove_prefix(1);
    }
    while (!text.empty() && text.back() == ' ') {
        text.remove_suffix(1);
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) {
            throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
        }
        Rational q = num / den;
        q.canonicalize();
        return q;
    }
    return parse_decimal(text);
}

double to_double(const Rational& q)
{
    const double d = q.get_d();
    if (!std::isfinite(d) || Rational(d) == q) {
        return d;
    }
    // get_d rounds toward zero; the nearest double is d or its neighbor away from zero.
    const double away = std::nextafter(d, sgn(q) > 0 ? HUGE_VAL : -HUGE_VAL);
    if (!std::isfinite(away)) {
        return d;
    }
    const Rational gap_d = abs(q - Rational(d));
    const Rational gap_away = abs(Rational(away) - q);
    if (gap_away < gap_d) {
        return away;
    }
    if (gap_away == gap_d) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        return (bits & 1u) ? away : d;
    }
    return d;
}

std::string format_double(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_rational(const Rational& q)
{
    if (q.get_den() == 1) {
        return q.get_num().get_str();
    }
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

const Rational& GasValue::exact() const
{
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return *q;
    }
    throw InvalidArgument("value was computed in float mode");
}

double GasValue::approx() const
{
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return to_double(*q);
    }
    return std::get<double>(value_);
}

bool GasValue::is_zero() const
{
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return *q == 0;
    }
    return std::get<double>(value_) == 0.0;
}

std::string GasValue::str() const
{
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return format_rational(*q);
    }
    return format_double(std::get<double>(value_));
}

} // namespace polygas
