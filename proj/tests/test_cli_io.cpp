#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "walg/json_io.hpp"

using namespace walg;

TEST_CASE("rational and cyclotomic round trips") {
    Rational r(-22, 7);
    CHECK(rational_from_json(to_json(r)) == r);

    Cyclotomic c = Cyclotomic::root_of_unity(12, 5) * Cyclotomic(Rational(3, 4)) +
                   Cyclotomic(Rational(1, 9));
    CHECK(cyclotomic_from_json(to_json(c)) == c);
    // emitted form is canonical, so dumps are bit-identical
    CHECK(to_json(cyclotomic_from_json(to_json(c))).dump() == to_json(c).dump());
}

TEST_CASE("state round trip") {
    VertexAlgebra va('A', 2);
    LatticeState s = va.build_omega_d(2);
    s += LatticeState::lattice_point(IVec{1, -1}) * Cyclotomic::root_of_unity(3, 1);
    json j = to_json(s);
    LatticeState back = state_from_json(j);
    CHECK(back == s);
    CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("operator round trip") {
    VertexAlgebra va('A', 1);
    TwistedModule tm(va);
    LaurentWindow w{Rational(-5), Rational(5)};
    auto op = tm.twisted_field(va.build_omega(), w, 4);
    json j = to_json(op);
    auto back = operator_from_json(j);
    CHECK(back == op);
    CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("root system dump") {
    json j = to_json(RootSystem::build('D', 4));
    CHECK(j.at("h") == 6);
    CHECK(j.at("roots").size() == 24);
    CHECK(j.at("exponents") == json::array({1, 3, 3, 5}));
}

TEST_CASE("report serialization") {
    auto table = dvv_oracle(1, 4);
    auto report = check_annihilation(table, -1, 1, 1, 4);
    json j = to_json(report);
    CHECK(j.at("all_zero") == true);
    CHECK(j.at("checked").get<long>() == report.checked);

    table.corrupt(1, {1}, Rational(1, 23));
    auto bad = check_annihilation(table, -1, 1, 1, 4);
    json jb = to_json(bad);
    CHECK(jb.at("all_zero") == false);
    CHECK(jb.at("residuals").size() > 0);
}

TEST_CASE("correlator table dump") {
    auto table = dvv_oracle(1, 3);
    json j = correlator_table_json(table);
    bool found = false;
    for (const auto &e : j.at("correlators"))
        if (e.at("genus") == 0 && e.at("ks") == json::array({0, 0, 0}))
            found = rational_from_json(e.at("value")) == Rational(1);
    CHECK(found);
}
