#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "learnrk/errors.hpp"

namespace learnrk {

using Complex = std::complex<double>;

inline double parse_double_strict(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("invalid numeric literal: '" + std::string(text) + "'");
    }
    return value;
}

/// Parses "a+bi" style complex literals: "2", "-1.5i", "1+2i", "1e-3-2.5e2i",
/// "i", "-i". At most one real and one imaginary term, real part first.
inline Complex parse_complex(std::string_view raw) {
    std::string text;
    text.reserve(raw.size());
    for (char c : raw) {
        if (c != ' ' && c != '\t') text.push_back(c);
    }
    if (text.empty()) throw ParseError("empty complex literal");

    std::vector<std::string_view> terms;
    std::size_t start = 0;
    for (std::size_t k = 1; k < text.size(); ++k) {
        char c = text[k];
        char prev = text[k - 1];
        if ((c == '+' || c == '-') && prev != 'e' && prev != 'E' && prev != '+' && prev != '-') {
            terms.emplace_back(text.data() + start, k - start);
            start = k;
        }
    }
    terms.emplace_back(text.data() + start, text.size() - start);
    if (terms.size() > 2) throw ParseError("invalid complex literal: '" + std::string(raw) + "'");

    bool have_real = false;
    bool have_imag = false;
    double re = 0.0;
    double im = 0.0;
    for (std::string_view term : terms) {
        if (term.empty()) throw ParseError("invalid complex literal: '" + std::string(raw) + "'");
        if (term.back() == 'i' || term.back() == 'I') {
            if (have_imag) throw ParseError("invalid complex literal: '" + std::string(raw) + "'");
            have_imag = true;
            std::string_view body = term.substr(0, term.size() - 1);
            if (body.empty() || body == "+") {
                im = 1.0;
            } else if (body == "-") {
                im = -1.0;
            } else {
                im = parse_double_strict(body[0] == '+' ? body.substr(1) : body);
            }
        } else {
            if (have_real) throw ParseError("invalid complex literal: '" + std::string(raw) + "'");
            have_real = true;
            re = parse_double_strict(term[0] == '+' ? term.substr(1) : term);
        }
    }
    return Complex(re, im);
}

/// Shortest round-trip decimal form.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

/// Fixed 17 significant digits; round-trips every finite double exactly.
inline std::string format_double17(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format_complex(Complex z) {
    std::string out = format_double(z.real());
    if (z.imag() >= 0.0 || std::isnan(z.imag())) out.push_back('+');
    out += format_double(z.imag());
    out.push_back('i');
    return out;
}

}  // namespace learnrk
