#include "degmap/witness.hpp"
#include "support.hpp"

#include "doctest.h"

#include <map>

using namespace degmap;
using namespace testsupport;

namespace {

using Table = std::map<std::string, Depth>;

/// Depths of split holes keyed by point; clusters keyed by their factor.
Table depth_table(const Map& f) {
    Table t;
    for (const auto& h : decompose(f).holes) t[h.split ? h.point.to_string() : poly_to_string(h.factor)] = h.depth;
    return t;
}

const LimitRecord& limit_of(const Certificate& c, std::size_t fam, int sample = 0) {
    for (const auto& r : c.limits)
        if (r.family == static_cast<int>(fam) && r.sample == sample) return r;
    FAIL("no limit record");
    return c.limits.front();
}

std::size_t family_index(const Certificate& c, const std::string& label) {
    for (std::size_t i = 0; i < c.families.size(); ++i)
        if (c.families[i].label == label) return i;
    FAIL("no family " << label);
    return 0;
}

/// Independent limit: literal n-th iterate over the Puiseux field, conjugated and reduced.
Map oracle_limit(const FamilySpec& fam, int sample, int n) {
    return reduce_at(iterate(fam.maps[static_cast<std::size_t>(sample)], n), fam.conjugator);
}

bool has_parameter(const FamilySpec& f, const std::string& key) {
    for (const auto& [k, v] : f.parameters)
        if (k == key) return true;
    return false;
}

void require_valid(const Certificate& c) {
    VerificationReport rep = verify_certificate(c);
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.failures.empty());
    CHECK(rep.valid);
}

/// Property suite for lambda families: samples kept, limits stable and pairwise distinct, oracle agreement.
void lambda_suite(const Map& f, int n, bool with_oracle) {
    set_surplus_checks(true);
    const Certificate c = make_certificate(f, n);
    require_valid(c);
    REQUIRE(c.families.size() == 1);
    const FamilySpec& fam = c.families[0];
    CHECK(fam.lambdas == default_lambdas());
    CHECK_FALSE(has_parameter(fam, "lambda_resampled"));
    CHECK(c.distinctness == "pairwise non-equal classes across lambda samples");
    for (const auto& r : c.limits) {
        CHECK(r.stable);
        for (const auto& e : r.ledger) CHECK(e.ok);
    }
    for (const auto& g : fam.maps) CHECK(coefficient_reduction(g) == c.base);
    if (with_oracle)
        for (int s = 0; s < static_cast<int>(fam.maps.size()); ++s) CHECK(oracle_limit(fam, s, n) == limit_of(c, 0, s).limit);
}

}  // namespace

TEST_CASE("cubic polynomial witness: depth tables confirmed by literal expansion") {
    set_surplus_checks(true);
    const Certificate c = make_certificate(catalog_entry("G3").map, 2);
    CHECK(c.kind == CaseKind::Case4);
    REQUIRE(c.families.size() == 2);
    const std::size_t gi = family_index(c, "g"), pi = family_index(c, "psi");
    const LimitRecord &G = limit_of(c, gi), &F = limit_of(c, pi);
    CHECK(oracle_limit(c.families[gi], 0, 2) == G.limit);
    CHECK(oracle_limit(c.families[pi], 0, 2) == F.limit);
    CHECK(depth_table(G.limit) == Table{{"0", 4}, {"1", 1}, {"inf", 4}});
    CHECK(depth_table(F.limit) == Table{{"0", 4}, {"inf", 3}, {"1", 1}, {"-1", 1}});
    CHECK(G.semistable);
    CHECK_FALSE(G.stable);
    CHECK(F.stable);
    CHECK(c.distinctness == "two families with non-equal limit classes");
    require_valid(c);
}

TEST_CASE("constant-case witness: closed forms, literal expansion and d_0 pair") {
    set_surplus_checks(true);
    const Certificate c = make_certificate(catalog_entry("S5").map, 2);
    CHECK(c.kind == CaseKind::ConstantInduced);
    REQUIRE(c.families.size() == 2);
    const std::size_t gi = family_index(c, "g"), hi = family_index(c, "h");
    for (std::size_t fi : {gi, hi}) {
        const FamilySpec& fam = c.families[fi];
        REQUIRE(fam.closed_form_limit.has_value());
        CHECK(oracle_limit(fam, 0, 2) == *fam.closed_form_limit);
        CHECK(limit_of(c, fi).limit == *fam.closed_form_limit);
        CHECK(limit_of(c, fi).stable);
    }
    const PPoint zero = PPoint::at(GaussRat(0));
    CHECK(depth(limit_of(c, gi).limit, zero) == 5);
    CHECK(depth(limit_of(c, hi).limit, zero) == 6);
    // g_n = H^{d^{n-1}} [0:1]: every hole depth scales by d^{n-1}.
    const Table g = depth_table(limit_of(c, gi).limit);
    CHECK(g == Table{{"0", 5}, {"inf", 5}, {"1", 10}, {"2", 5}});
    require_valid(c);
}

TEST_CASE("constant-case witness at n = 3 follows the collected-power display") {
    const Certificate c = make_certificate(catalog_entry("S5").map, 3);
    const std::size_t hi = family_index(c, "h");
    // d_0(h_n) = d_0 (d^n - 1)/(d - 1) with d_0 = 1, d = 5.
    CHECK(depth(limit_of(c, hi).limit, PPoint::at(GaussRat(0))) == 31);
    CHECK(depth(limit_of(c, family_index(c, "g")).limit, PPoint::at(GaussRat(0))) == 25);
    require_valid(c);
}

TEST_CASE("strictly semistable constant case is identified with its normal form") {
    const Certificate c = make_certificate(catalog_entry("F3").map, 2);
    CHECK(c.kind == CaseKind::ConstantInduced);
    CHECK_FALSE(c.identifications.empty());
    for (const auto& id : c.identifications) CHECK(reduce_at(lift(id.from), id.conjugator) == id.limit);
    require_valid(c);
}

TEST_CASE("property suite: Case 1 at n = 3") { lambda_suite(catalog_entry("C1").map, 3, false); }

TEST_CASE("property suite: Case 2 at n = 2") { lambda_suite(catalog_entry("C2").map, 2, true); }

TEST_CASE("property suite: degree 4 polynomial case at n = 3") {
    const Map f = map_from_ints({0, 0, 0, 1, 0}, {1, 0, 0, 0, 0});  // [X^3Y : Y^4]
    CHECK(classify_case(f, 3).kind == CaseKind::Case4);
    lambda_suite(f, 3, false);
}

TEST_CASE("periodic bad hole: P3 at n = 2 and n = 3") {
    CHECK(classify_case(catalog_entry("P3").map, 2).kind == CaseKind::Case0);
    CHECK(classify_case(catalog_entry("P3").map, 3).kind == CaseKind::Case3);
    lambda_suite(catalog_entry("P3").map, 2, true);
    lambda_suite(catalog_entry("P3").map, 3, true);
}

TEST_CASE("monomial case: M3 at n = 5 has constant induced limits") {
    const Certificate c = make_certificate(catalog_entry("M3").map, 5);
    CHECK(c.kind == CaseKind::Case5);
    require_valid(c);
    for (const auto& r : c.limits)
        if (r.family == 0) CHECK(decompose(r.limit).induced_degree() == 0);
}

TEST_CASE("certificates are deterministic") {
    const Certificate a = make_certificate(catalog_entry("C2").map, 2), b = make_certificate(catalog_entry("C2").map, 2);
    REQUIRE(a.limits.size() == b.limits.size());
    for (std::size_t i = 0; i < a.limits.size(); ++i) CHECK(a.limits[i].limit == b.limits[i].limit);
    CHECK(a.distinctness_details == b.distinctness_details);
}

TEST_CASE("tampered certificates are rejected") {
    const Certificate c = make_certificate(catalog_entry("G3").map, 2);
    {
        Certificate t = c;
        REQUIRE_FALSE(t.limits[0].ledger.empty());
        t.limits[0].ledger[0].depth += 1;
        VerificationReport rep = verify_certificate(t);
        CHECK_FALSE(rep.valid);
        bool pointer = false;
        for (const auto& f : rep.failures) pointer = pointer || f.find("ledger entry 0") != std::string::npos;
        CHECK(pointer);
    }
    {
        Certificate t = c;
        t.families[0].maps[0].p.c[0] += TPoly(GaussRat(1));  // changes the Gauss reduction
        CHECK_FALSE(verify_certificate(t).valid);
    }
    {
        Certificate t = c;
        t.limits[1].stable = !t.limits[1].stable;
        CHECK_FALSE(verify_certificate(t).valid);
    }
    {
        Certificate t = c;
        t.distinctness_details.clear();
        CHECK_FALSE(verify_certificate(t).valid);
    }
}

TEST_CASE("maps outside the hypothesis are refused") {
    CHECK_THROWS_AS(make_certificate(map_from_ints({0, 0, 0, 1}, {1, 0, 0, 0}), 2), NotApplicable);  // [X^3 : Y^3]
    std::mt19937 rng(20);
    int seen = 0;
    while (seen < 20) {
        std::uniform_int_distribution<int> deg(3, 4);
        const Map f = random_nondegenerate(rng, deg(rng));
        if (!is_stable(f)) continue;
        ++seen;
        const int n = 2 + seen % 2;
        CHECK_FALSE(is_n_unstable(f, n));
        CHECK_THROWS_AS(make_certificate(f, n), NotApplicable);
        CHECK_THROWS_AS(build_case1(f, n, default_lambdas()), NotApplicable);
        CHECK_THROWS_AS(build_case02(f, n, default_lambdas()), NotApplicable);
        CHECK_THROWS_AS(build_case3(f, n, default_lambdas()), NotApplicable);
        CHECK_THROWS_AS(build_case4(f, n, default_lambdas()), NotApplicable);
        CHECK_THROWS_AS(build_case5(f, n, default_lambdas()), NotApplicable);
        CHECK_THROWS_AS(build_constant(f, n, default_lambdas()), NotApplicable);
    }
}

TEST_CASE("surplus ledger predicts every hole of a limit") {
    const Certificate c = make_certificate(catalog_entry("C2").map, 2);
    const FamilySpec& fam = c.families[0];
    const LimitRecord& r = limit_of(c, 0, 1);
    const auto ledger = surplus_ledger(fam.maps[1], fam.zeta0, 2, r.limit);
    Depth total = 0;
    for (const auto& e : ledger) {
        CHECK(e.ok);
        CHECK(e.depth == e.predicted);
        total += e.depth * e.factor.degree();
    }
    CHECK(total == 25 - decompose(r.limit).induced_degree());
}

TEST_CASE("periodic bad hole with total cycle depth 3: generic branch") {
    // X^3 [(X-Y)Y : X(X-2Y)]: hole 0 of depth 3 on the cycle 0 <-> inf, neither point critical.
    const Map f = map_from_ints({0, 0, 0, -1, 1, 0}, {0, 0, 0, 0, -2, 1});
    CHECK(classify_case(f, 2).kind == CaseKind::Case0);
    CHECK(classify_case(f, 3).kind == CaseKind::Case3);
    for (int n : {2, 3}) {
        CAPTURE(n);
        lambda_suite(f, n, n == 2);
        const Certificate c = make_certificate(f, n);
        bool generic = false;
        for (const auto& [k, v] : c.families[0].parameters) generic = generic || (k == "branch" && v == "generic");
        CHECK(generic);
    }
}
