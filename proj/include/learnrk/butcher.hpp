#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "learnrk/errors.hpp"
#include "learnrk/rational.hpp"

namespace learnrk {

/// Runge-Kutta method as a Butcher tableau. Entries are exact rationals;
/// nothing is rounded until evaluation time.
struct ButcherTableau {
    std::string name;
    int p = 0;
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    bool is_explicit = false;
};

struct ValidationReport {
    bool consistent = false;
    bool is_explicit = false;
    int detected_order = 0;
    std::vector<std::string> messages;
};

namespace detail {

inline bool compute_explicit(const std::vector<std::vector<Rational>>& A) {
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = i; j < A.size(); ++j) {
            if (A[i][j] != 0) return false;
        }
    }
    return true;
}

inline ButcherTableau make_tableau(std::string name, std::vector<std::vector<Rational>> A,
                                   std::vector<Rational> b) {
    ButcherTableau t;
    t.name = std::move(name);
    t.p = static_cast<int>(b.size());
    t.A = std::move(A);
    t.b = std::move(b);
    t.is_explicit = compute_explicit(t.A);
    return t;
}

}  // namespace detail

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "explicit_euler", "explicit_midpoint", "heun2",           "rk4",
        "cheb2",          "implicit_euler",    "implicit_midpoint"};
    return names;
}

inline ButcherTableau builtin(std::string_view name) {
    using detail::make_tableau;
    const Rational z(0), one(1), half(1, 2);
    if (name == "explicit_euler") {
        return make_tableau("explicit_euler", {{z}}, {one});
    }
    if (name == "explicit_midpoint") {
        return make_tableau("explicit_midpoint", {{z, z}, {half, z}}, {z, one});
    }
    if (name == "heun2") {
        return make_tableau("heun2", {{z, z}, {one, z}}, {half, half});
    }
    if (name == "rk4") {
        return make_tableau("rk4",
                            {{z, z, z, z}, {half, z, z, z}, {z, half, z, z}, {z, z, one, z}},
                            {Rational(1, 6), Rational(1, 3), Rational(1, 3), Rational(1, 6)});
    }
    if (name == "cheb2") {
        return make_tableau("cheb2", {{z, z}, {half, z}}, {Rational(3, 4), Rational(1, 4)});
    }
    if (name == "implicit_euler") {
        return make_tableau("implicit_euler", {{one}}, {one});
    }
    if (name == "implicit_midpoint") {
        return make_tableau("implicit_midpoint", {{half}}, {one});
    }
    std::string msg = "unknown method '" + std::string(name) + "'; available:";
    for (const auto& n : builtin_names()) msg += " " + n;
    throw UnknownMethodError(msg);
}

namespace detail {

inline Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return rational_from_double(v.get<double>());
    throw ParseError("tableau entry must be a number or a 'p/q' string");
}

}  // namespace detail

inline ButcherTableau tableau_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("tableau document must be a JSON object");
    if (!doc.contains("A") || !doc.contains("b")) {
        throw ParseError("tableau document requires fields 'A' and 'b'");
    }
    ButcherTableau t;
    t.name = doc.value("name", std::string("custom"));

    const auto& jb = doc.at("b");
    if (!jb.is_array() || jb.empty()) throw ParseError("'b' must be a non-empty array");
    for (const auto& v : jb) t.b.push_back(detail::rational_from_json(v));
    t.p = static_cast<int>(t.b.size());

    const auto& jA = doc.at("A");
    if (!jA.is_array()) throw ParseError("'A' must be an array of rows");
    if (static_cast<int>(jA.size()) != t.p) {
        throw DimensionError("A has " + std::to_string(jA.size()) + " rows but b has length " +
                             std::to_string(t.p));
    }
    for (const auto& jrow : jA) {
        if (!jrow.is_array() || static_cast<int>(jrow.size()) != t.p) {
            throw DimensionError("A must be a square " + std::to_string(t.p) + "x" +
                                 std::to_string(t.p) + " matrix");
        }
        std::vector<Rational> row;
        for (const auto& v : jrow) row.push_back(detail::rational_from_json(v));
        t.A.push_back(std::move(row));
    }
    t.is_explicit = detail::compute_explicit(t.A);
    return t;
}

inline ButcherTableau parse_tableau(std::string_view text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed tableau JSON");
    return tableau_from_json(doc);
}

inline nlohmann::json serialize_tableau(const ButcherTableau& t) {
    nlohmann::json doc;
    doc["name"] = t.name;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.A) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const auto& v : row) jrow.push_back(rational_to_string(v));
        rows.push_back(std::move(jrow));
    }
    doc["A"] = std::move(rows);
    nlohmann::json jb = nlohmann::json::array();
    for (const auto& v : t.b) jb.push_back(rational_to_string(v));
    doc["b"] = std::move(jb);
    return doc;
}

/// Classical order conditions, checked exactly. c_i is the row sum of A,
/// so the conditions depend only on (A, b).
inline ValidationReport validate(const ButcherTableau& t) {
    ValidationReport r;
    r.is_explicit = t.is_explicit;

    const int p = t.p;
    std::vector<Rational> c(p, Rational(0));
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) c[i] += t.A[i][j];
    }

    Rational sum_b(0);
    for (const auto& bi : t.b) sum_b += bi;
    r.consistent = (sum_b == 1);
    if (!r.consistent) {
        r.messages.push_back("weights sum to " + rational_to_string(sum_b) + ", expected 1");
        return r;
    }
    r.detected_order = 1;

    auto sum_bc_pow = [&](int k) {
        Rational s(0);
        for (int i = 0; i < p; ++i) {
            Rational ck(1);
            for (int m = 0; m < k; ++m) ck *= c[i];
            s += t.b[i] * ck;
        }
        return s;
    };
    auto sum_bAc = [&]() {
        Rational s(0);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) s += t.b[i] * t.A[i][j] * c[j];
        }
        return s;
    };
    auto sum_bcAc = [&]() {
        Rational s(0);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) s += t.b[i] * c[i] * t.A[i][j] * c[j];
        }
        return s;
    };
    auto sum_bAc2 = [&]() {
        Rational s(0);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) s += t.b[i] * t.A[i][j] * c[j] * c[j];
        }
        return s;
    };
    auto sum_bAAc = [&]() {
        Rational s(0);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                for (int k = 0; k < p; ++k) s += t.b[i] * t.A[i][j] * t.A[j][k] * c[k];
            }
        }
        return s;
    };

    if (sum_bc_pow(1) != Rational(1, 2)) return r;
    r.detected_order = 2;

    if (sum_bc_pow(2) != Rational(1, 3) || sum_bAc() != Rational(1, 6)) return r;
    r.detected_order = 3;

    if (sum_bc_pow(3) != Rational(1, 4) || sum_bcAc() != Rational(1, 8) ||
        sum_bAc2() != Rational(1, 12) || sum_bAAc() != Rational(1, 24)) {
        return r;
    }
    r.detected_order = 4;
    return r;
}

}  // namespace learnrk
