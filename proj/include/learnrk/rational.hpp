#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <string_view>

#include "learnrk/errors.hpp"

namespace learnrk {

// Exact rational scalar. All tableau entries and stability-function
// coefficients are kept in this form; doubles appear only at evaluation time.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact conversion: every finite double is p/2^k.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) {
        throw NonFiniteError("non-finite value cannot be converted to a rational");
    }
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
    auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(scaled);
    if (exp >= 0) {
        r *= Rational(BigInt(1) << exp);
    } else {
        r /= Rational(BigInt(1) << -exp);
    }
    return r;
}

/// Parses "p/q" or a plain integer string. Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
    auto parse_int = [](std::string_view s) -> BigInt {
        if (s.empty()) throw ParseError("empty integer in rational literal");
        std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
        if (start == s.size()) throw ParseError("sign without digits in rational literal");
        for (std::size_t i = start; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') {
                throw ParseError("invalid character in rational literal: '" + std::string(s) + "'");
            }
        }
        BigInt magnitude{std::string(s.substr(start))};
        return s[0] == '-' ? BigInt(-magnitude) : magnitude;
    };

    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_int(text));
    }
    BigInt num = parse_int(text.substr(0, slash));
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) throw NonFiniteError("rational with zero denominator: '" + std::string(text) + "'");
    return Rational(num, den);
}

/// "p" for integers, "p/q" otherwise; q is always positive.
inline std::string rational_to_string(const Rational& r) {
    std::string out = numerator(r).str();
    if (denominator(r) != 1) {
        out += '/';
        out += denominator(r).str();
    }
    return out;
}

}  // namespace learnrk
