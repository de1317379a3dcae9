#include <catch2/catch_amalgamated.hpp>

#include "learnrk/butcher.hpp"

using namespace learnrk;

TEST_CASE("registry exposes the seven built-in methods") {
    REQUIRE(builtin_names().size() == 7);
    for (const auto& name : builtin_names()) {
        ButcherTableau t = builtin(name);
        REQUIRE(t.name == name);
        REQUIRE(t.p == static_cast<int>(t.b.size()));
        REQUIRE(t.A.size() == t.b.size());
        ValidationReport r = validate(t);
        REQUIRE(r.consistent);
        REQUIRE(r.detected_order >= 1);
    }
    REQUIRE_THROWS_AS(builtin("rk5"), UnknownMethodError);
}

TEST_CASE("built-in tableaux have the expected entries") {
    ButcherTableau euler = builtin("explicit_euler");
    REQUIRE(euler.p == 1);
    REQUIRE(euler.A[0][0] == 0);
    REQUIRE(euler.b[0] == 1);
    REQUIRE(euler.is_explicit);

    ButcherTableau mid = builtin("explicit_midpoint");
    REQUIRE(mid.p == 2);
    REQUIRE(mid.A[1][0] == Rational(1, 2));
    REQUIRE(mid.b[0] == 0);
    REQUIRE(mid.b[1] == 1);

    ButcherTableau cheb = builtin("cheb2");
    REQUIRE(cheb.A[1][0] == Rational(1, 2));
    REQUIRE(cheb.b[0] == Rational(3, 4));
    REQUIRE(cheb.b[1] == Rational(1, 4));

    REQUIRE_FALSE(builtin("implicit_euler").is_explicit);
    REQUIRE_FALSE(builtin("implicit_midpoint").is_explicit);
}

TEST_CASE("detected order matches classical theory") {
    auto order = [](const char* name) { return validate(builtin(name)).detected_order; };
    REQUIRE(order("explicit_euler") == 1);
    REQUIRE(order("explicit_midpoint") == 2);
    REQUIRE(order("heun2") == 2);
    REQUIRE(order("rk4") == 4);
    REQUIRE(order("cheb2") == 1);
    REQUIRE(order("implicit_euler") == 1);
    REQUIRE(order("implicit_midpoint") == 2);
}

TEST_CASE("tableau json round trip is exact") {
    for (const auto& name : builtin_names()) {
        ButcherTableau t = builtin(name);
        ButcherTableau back = parse_tableau(serialize_tableau(t).dump());
        REQUIRE(back.name == t.name);
        REQUIRE(back.p == t.p);
        REQUIRE(back.A == t.A);
        REQUIRE(back.b == t.b);
        REQUIRE(back.is_explicit == t.is_explicit);
    }
}

TEST_CASE("parser accepts fractions, decimals, and integers") {
    ButcherTableau t = parse_tableau(R"({"name":"e", "A":[[0]], "b":[1]})");
    REQUIRE(t.p == 1);
    REQUIRE(t.b[0] == 1);
    REQUIRE(validate(t).detected_order == 1);

    ButcherTableau u = parse_tableau(R"({"A":[[0,0],["1/2",0]], "b":[0.0, 1.0]})");
    REQUIRE(u.A[1][0] == Rational(1, 2));
    REQUIRE(u.b[1] == 1);
    REQUIRE(u.name == "custom");
}

TEST_CASE("parser rejects malformed documents") {
    REQUIRE_THROWS_AS(parse_tableau("not json"), ParseError);
    REQUIRE_THROWS_AS(parse_tableau(R"({"A":[[0]]})"), ParseError);
    REQUIRE_THROWS_AS(parse_tableau(R"({"A":[[0,0],[0,0]], "b":[1,0,0]})"), DimensionError);
    REQUIRE_THROWS_AS(parse_tableau(R"({"A":[[0,0]], "b":[1,0]})"), DimensionError);
    REQUIRE_THROWS_AS(parse_tableau(R"({"A":[["x"]], "b":[1]})"), ParseError);
    REQUIRE_THROWS_AS(parse_tableau(R"({"A":[["1/0"]], "b":[1]})"), NonFiniteError);
}

TEST_CASE("inconsistent weights are parsed but flagged") {
    ButcherTableau t = parse_tableau(R"({"A":[[0,0],[1,0]], "b":[0.4, 0.5]})");
    ValidationReport r = validate(t);
    REQUIRE_FALSE(r.consistent);
    REQUIRE(r.detected_order == 0);
    REQUIRE_FALSE(r.messages.empty());
}
