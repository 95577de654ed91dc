#include "degmap/catalog.hpp"
#include "degmap/serialize.hpp"
#include "support.hpp"

#include "doctest.h"

using namespace degmap;
using namespace testsupport;

TEST_CASE("maps round-trip through JSON") {
    std::mt19937 rng(4);
    for (int it = 0; it < 40; ++it) {
        const Map f = planted_map(rng, 2 + it % 4);
        CHECK(map_from_json(map_to_json(f)) == f);
        CHECK(map_from_json(parse_json_text(map_to_json(f).dump())) == f);
    }
    CHECK(map_to_json(catalog_entry("G3").map).dump() == R"({"P":["0","0","1","0"],"Q":["1","0","0","0"]})");
}

TEST_CASE("Puiseux data round-trips through JSON") {
    std::mt19937 rng(5);
    for (int it = 0; it < 40; ++it) {
        const TPoly x = random_tpoly(rng, 3);
        CHECK(tpoly_from_json(tpoly_to_json(x)) == x);
        const TMap g = random_factored(rng, 2).expand();
        CHECK(tmap_from_json(tmap_to_json(g)) == g);
    }
}

TEST_CASE("certificates round-trip exactly and still verify") {
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{{"G3", 2}, {"F3", 2}, {"S5", 2}, {"C2", 2}, {"P3", 3}}) {
        CAPTURE(name);
        const Certificate c = make_certificate(catalog_entry(name).map, n);
        const Json j = certificate_to_json(c);
        const Certificate back = certificate_from_json(parse_json_text(j.dump(2)));
        CHECK(certificate_to_json(back) == j);
        CHECK(verify_certificate(back).valid);
    }
}

TEST_CASE("malformed input is reported with its location") {
    auto where = [](const std::string& text) {
        try {
            map_from_json(parse_json_text(text));
        } catch (const InputError& e) {
            return e.where;
        }
        return std::string("no error");
    };
    CHECK(where(R"({"P":["0","1/x"],"Q":["1","0"]})") == "/P/1");
    CHECK(where(R"({"P":["0","1"],"Q":["1"]})") == "/");
    CHECK(where(R"({"P":["0","1"]})") == "/Q");
    CHECK(where(R"({"P":["0","1"],"Q":["1",true]})") == "/Q/1");
    CHECK(where(R"({"P":["0","1"],)") == "byte 16");  // one past the end: unexpected end of input
    CHECK_THROWS_AS(case_from_name("Case9"), InputError);
    Json c = certificate_to_json(make_certificate(catalog_entry("G3").map, 2));
    c["limits"][0]["ledger"][0]["depth"] = "four";
    try {
        certificate_from_json(c);
        FAIL("expected an input error");
    } catch (const InputError& e) {
        CHECK(e.where == "/limits/0/ledger/0/depth");
    }
}
