#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "learnrk/rational.hpp"

namespace learnrk {

using Complex = std::complex<double>;

/// Dense univariate polynomial with coefficients stored ascending
/// (coefficient(k) multiplies z^k). Trailing zero coefficients are trimmed,
/// so degree() is the true degree; the zero polynomial has degree -1.
template <class T>
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<T> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

    static Polynomial constant(T value) { return Polynomial(std::vector<T>{std::move(value)}); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    T coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : T(0); }

    const std::vector<T>& coefficients() const { return coeffs_; }

    template <class U>
    U evaluate(const U& x) const {
        U acc(0);
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            acc = acc * x + U(coeffs_[i]);
        }
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial();
        std::vector<T> out(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) {
            out[k - 1] = coeffs_[k] * T(static_cast<long long>(k));
        }
        return Polynomial(std::move(out));
    }

    friend Polynomial operator+(const Polynomial& lhs, const Polynomial& rhs) {
        std::vector<T> out(std::max(lhs.coeffs_.size(), rhs.coeffs_.size()), T(0));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = lhs.coefficient(k) + rhs.coefficient(k);
        return Polynomial(std::move(out));
    }

    friend Polynomial operator-(const Polynomial& lhs, const Polynomial& rhs) {
        std::vector<T> out(std::max(lhs.coeffs_.size(), rhs.coeffs_.size()), T(0));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = lhs.coefficient(k) - rhs.coefficient(k);
        return Polynomial(std::move(out));
    }

    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
        if (lhs.coeffs_.empty() || rhs.coeffs_.empty()) return Polynomial();
        std::vector<T> out(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, T(0));
        for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i) {
            for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) {
                out[i + j] += lhs.coeffs_[i] * rhs.coeffs_[j];
            }
        }
        return Polynomial(std::move(out));
    }

    friend Polynomial operator*(const T& scalar, const Polynomial& poly) {
        std::vector<T> out = poly.coeffs_;
        for (auto& c : out) c = c * scalar;
        return Polynomial(std::move(out));
    }

    friend bool operator==(const Polynomial& lhs, const Polynomial& rhs) {
        return lhs.coeffs_ == rhs.coeffs_;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == T(0)) coeffs_.pop_back();
    }

    std::vector<T> coeffs_;
};

using RationalPolynomial = Polynomial<Rational>;

inline std::vector<Complex> to_complex_coefficients(const RationalPolynomial& poly) {
    std::vector<Complex> out;
    out.reserve(poly.coefficients().size());
    for (const auto& c : poly.coefficients()) out.emplace_back(to_double(c), 0.0);
    return out;
}

/// Horner evaluation of ascending complex coefficients.
inline Complex horner(const std::vector<Complex>& coeffs, Complex z) {
    Complex acc(0.0, 0.0);
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
}

}  // namespace learnrk
