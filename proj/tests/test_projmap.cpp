#include "degmap/catalog.hpp"
#include "degmap/projmap.hpp"
#include "support.hpp"

#include "doctest.h"

using namespace degmap;
using namespace testsupport;

namespace {

const PPoint INF = PPoint::infinity();
PPoint pt(long v) { return PPoint::at(GaussRat(v)); }
const Map& cat(const char* name) { return catalog_entry(name).map; }

/// Depth of z in f^n by literal composition and gcd.
Depth brute_depth(const Map& f, const PPoint& z, int n) { return depth(iterate_compose(f, n), z); }

}  // namespace

TEST_CASE("resultant") {
    Poly X3 = Poly::monomial(3, 0), Y3 = Poly::monomial(0, 3);
    CHECK(!resultant(X3, Y3).is_zero());
    CHECK(resultant(Poly::monomial(2, 1), Y3).is_zero());
    CHECK_THROWS_AS(resultant(X3, Poly::monomial(1, 1)), DegreeMismatch);
    std::mt19937 rng(3);
    for (int it = 0; it < 30; ++it) {
        PPoint r = random_point(rng);
        Poly a = linear_form(r) * random_poly(rng, 2), b = linear_form(r) * random_poly(rng, 2);
        CHECK(resultant(a, b).is_zero());
        Map g = random_induced(rng, 3);
        CHECK(!resultant(g.p, g.q).is_zero());
    }
}

TEST_CASE("decompose examples") {
    Decomposition D = decompose(cat("G3"));
    CHECK(D.h.degree() == 1);
    CHECK(D.induced == make_map(Poly::monomial(2, 0), Poly::monomial(0, 2)));
    REQUIRE(D.holes.size() == 1);
    CHECK(D.holes[0].point == INF);
    CHECK(D.holes[0].depth == 1);

    CHECK(decompose(map_from_ints({0, 0, 0, 1}, {1, 0, 0, 0})).holes.empty());

    D = decompose(cat("C1"));
    CHECK(D.induced == map_from_ints({1, -1, 1}, {1, 0, 0}));
    REQUIRE(D.holes.size() == 1);
    CHECK(D.holes[0].point == pt(0));
    CHECK(D.holes[0].depth == 3);
}

TEST_CASE("decompose keeps unsplit factors as clusters") {
    // (X^2 - 2Y^2)^2 (X^2 + Y^2) * [X : Y]; X^2 + Y^2 splits over Q(i), X^2 - 2Y^2 does not.
    Poly A = Poly({GaussRat(-2), GaussRat(0), GaussRat(1)});
    Poly B = Poly({GaussRat(1), GaussRat(0), GaussRat(1)});
    Poly H = A * A * B;
    Map f = canonical(Map{H * Poly::monomial(1, 0), H * Poly::monomial(0, 1)});
    Decomposition D = decompose(f);
    int split = 0, cluster = 0;
    Depth total = 0;
    for (const auto& e : D.holes) {
        (e.split ? split : cluster) += 1;
        total += e.depth * e.cluster_degree();
        if (e.split) CHECK(e.depth == 1);
        else CHECK(e.depth == 2);
    }
    CHECK(split == 2);
    CHECK(cluster == 1);
    CHECK(total == 6);
    CHECK(depth(f, PPoint::at(GaussRat::i())) == 1);
}

TEST_CASE("depth examples") {
    CHECK(depth(cat("G3"), INF) == 1);
    CHECK(depth(cat("G3"), pt(0)) == 0);
    CHECK(depth(cat("C1"), pt(0)) == 3);
}

TEST_CASE("local multiplicity examples") {
    Map sq = make_map(Poly::monomial(2, 0), Poly::monomial(0, 2));
    CHECK(local_multiplicity(sq, pt(0)) == 2);
    CHECK(local_multiplicity(sq, pt(1)) == 1);
    Map inv = make_map(Poly::monomial(0, 2), Poly::monomial(2, 0));
    CHECK(local_multiplicity(inv, INF) == 2);
}

TEST_CASE("I(d) membership examples") {
    CHECK(is_in_Id(cat("F3")));
    CHECK(!is_in_Id(cat("G3")));
    // H = X(X - Y), f̂ = [0:1] = 0 ... hole at 0 makes it I(d); shift to H(0) != 0.
    Map f = map_from_ints({0, 0, 0}, {2, -3, 1});  // (X - Y)(X - 2Y) [0:1]
    CHECK(!is_in_Id(f));
}

TEST_CASE("stability examples") {
    CHECK(is_semistable(cat("F3")));
    CHECK(!is_stable(cat("F3")));
    CHECK(is_stable(map_from_ints({0, 0, 0, 1}, {1, 0, 0, 0})));
    Map fixed = map_from_ints({0, 0, 0, 1}, {0, 0, 1, 0});  // [X^3 : X^2 Y]
    CHECK(!is_semistable(fixed));
    CHECK(is_semistable(cat("G3")));
    CHECK(!is_stable(cat("G3")));
    CHECK(is_stable(cat("S5")));
}

TEST_CASE("stability thresholds") {
    CHECK(mu_minus(3) == make_rat(1, 3));
    CHECK(mu_plus(3) == make_rat(2, 3));
    CHECK(mu_minus(4) == make_rat(1, 2));
    CHECK(mu_plus(4) == make_rat(1, 2));
    CHECK(mu_plus(9) == make_rat(5, 9));
    for (int d = 2; d < 40; ++d) CHECK(mu_plus(d) + mu_minus(d) == 1);
}

TEST_CASE("iterate_compose") {
    Map g2 = iterate_compose(cat("G3"), 2);
    CHECK(g2.degree() == 9);
    CHECK(depth(g2, INF) == 5);
    CHECK(iterate_compose(cat("G3"), 1) == cat("G3"));
    CHECK_THROWS_AS(iterate_compose(cat("C1"), 5), BudgetExceeded);
    std::mt19937 rng(5);
    for (int it = 0; it < 5; ++it) {
        Map f = random_nondegenerate(rng, 2);
        Map f3 = iterate_compose(f, 3);
        CHECK(!resultant(f3.p, f3.q).is_zero());
    }
}

TEST_CASE("iterate_factored") {
    FactoredIterate fi = iterate_factored(cat("G3"), 2);
    CHECK(fi.induced == make_map(Poly::monomial(4, 0), Poly::monomial(0, 4)));
    Poly hp = fi.hole_poly();
    CHECK(hp.degree() == 5);
    CHECK(point_order(hp, INF) == 5);
    CHECK_THROWS_AS(iterate_factored(cat("F3"), 2), InIndeterminacy);
    FactoredIterate one = iterate_factored(cat("C1"), 1);
    CHECK(one.hole_factors.size() == 1);
    CHECK(one.induced == decompose(cat("C1")).induced);
    std::mt19937 rng(9);
    Map f = random_nondegenerate(rng, 3);
    CHECK(iterate_factored(f, 2).hole_poly().degree() == 0);
}

TEST_CASE("hole polynomial of the iterate equals gcd of the literal iterate") {
    std::mt19937 rng(21);
    for (int it = 0; it < 25; ++it) {
        Map f = planted_map(rng, 3);
        for (int n = 2; n <= 3; ++n) {
            Poly hp = iterate_factored(f, n).hole_poly();
            Map fn = iterate_compose(f, n);
            Poly g = gcd(fn.p, fn.q);
            REQUIRE(g.degree() == hp.degree());
            // Equal up to a unit: compare after scaling both to monic dehomogenizations.
            CHECK(gcd(g, hp).degree() == g.degree());
        }
    }
}

TEST_CASE("depth_iterate examples") {
    CHECK(depth_iterate(cat("G3"), INF, 2) == 5);
    CHECK(depth_iterate(cat("P3"), pt(0), 2) == 6);
    CHECK(depth_iterate(cat("G3"), pt(5), 3) == 0);
    CHECK(prop_depth_iterate(cat("G3"), INF, 2) == make_rat(5, 9));
    CHECK_THROWS_AS(depth_iterate(cat("F3"), pt(0), 2), InIndeterminacy);
}

TEST_CASE("depth_iterate agrees with brute force on random planted maps") {
    std::mt19937 rng(2024);
    for (int it = 0; it < 40; ++it) {
        int d = 2 + it % 3;
        Map f = planted_map(rng, d);
        for (int n = 2; n <= 3; ++n)
            for (const auto& e : decompose(f).holes)
                if (e.split) CHECK(depth_iterate(f, e.point, n) == brute_depth(f, e.point, n));
    }
}

TEST_CASE("n-unstable, bad hole and case examples") {
    CHECK(is_n_unstable(cat("G3"), 2));
    CHECK(!is_n_unstable(map_from_ints({0, 0, 0, 1}, {1, 0, 0, 0}), 4));
    CHECK(!is_n_unstable(cat("F3"), 2));
    CHECK(bad_hole(cat("G3"), 2) == INF);
    CHECK(bad_hole(cat("M3"), 5) == INF);
    CHECK(bad_hole(cat("P3"), 2) == pt(0));
    CHECK_THROWS_AS(bad_hole(cat("M3"), 4), NotUnstable);

    CHECK(classify_case(cat("G3"), 2).kind == CaseKind::Case4);
    CHECK(classify_case(cat("M3"), 5).kind == CaseKind::Case5);
    CHECK(classify_case(cat("P3"), 3).kind == CaseKind::Case3);
    CHECK(classify_case(cat("P3"), 2).kind == CaseKind::Case0);
    CHECK(classify_case(cat("C2"), 2).kind == CaseKind::Case2);
    CHECK(classify_case(cat("C1"), 3).kind == CaseKind::Case1);
    CHECK_THROWS_AS(classify_case(cat("M3"), 3), NotUnstable);
}

TEST_CASE("constant induced members of U_n have depth (d+1)/2") {
    // X^2 Y [1 : 1]: holes 0 (depth 2), inf (depth 1), constant value 1 is not a hole.
    Map f = map_from_ints({0, 0, 1, 0}, {0, 0, 1, 0});
    for (int n = 2; n <= 4; ++n) {
        if (!is_n_unstable(f, n)) continue;
        CaseTag c = classify_case(f, n);
        CHECK(c.kind == CaseKind::ConstantInduced);
        CHECK(c.bad_depth == 2);
    }
    CHECK(is_n_unstable(f, 2));
}

TEST_CASE("catalog verdicts are reproduced") {
    for (const auto& e : catalog()) {
        CAPTURE(e.name);
        CHECK(is_semistable(e.map) == e.semistable);
        CHECK(is_stable(e.map) == e.stable);
        CHECK(is_in_Id(e.map) == e.in_Id);
        for (const auto& x : e.expectations) {
            CAPTURE(x.n);
            CHECK(is_n_unstable(e.map, x.n) == x.unstable);
            if (x.unstable) {
                CaseTag c = classify_case(e.map, x.n);
                CHECK(c.kind == *x.kind);
                CHECK(c.bad_hole == *x.bad_hole);
            }
        }
    }
}

TEST_CASE("decomposition invariants on random maps") {
    std::mt19937 rng(99);
    for (int it = 0; it < 60; ++it) {
        Map f = planted_map(rng, 2 + it % 4);
        Decomposition D = decompose(f);
        Map fc = canonical(f);
        CHECK(D.h * D.induced.p == fc.p);
        CHECK(D.h * D.induced.q == fc.q);
        if (D.induced_degree() >= 1) CHECK(!resultant(D.induced.p, D.induced.q).is_zero());
        Depth total = 0;
        for (const auto& e : D.holes) total += e.depth * e.cluster_degree();
        CHECK(total + D.induced_degree() == D.d);
        CHECK(resultant(fc.p, fc.q).is_zero() == (D.h.degree() > 0));
    }
}

TEST_CASE("semistable iterate forces semistable map") {
    std::mt19937 rng(123);
    for (int it = 0; it < 60; ++it) {
        Map f = planted_map(rng, 3 + it % 2);
        for (int n = 2; n <= 3; ++n)
            if (is_semistable_iterate(f, n)) CHECK(is_semistable(f));
    }
}

TEST_CASE("structural properties of U_n members") {
    std::vector<std::pair<Map, int>> members;
    for (const auto& e : catalog())
        for (const auto& x : e.expectations)
            if (x.unstable) members.push_back({e.map, x.n});
    std::mt19937 rng(77);
    for (int it = 0; it < 300 && members.size() < 40; ++it) {
        Map f = planted_map(rng, 3 + it % 3);
        if (is_n_unstable(f, 2)) members.push_back({f, 2});
    }
    CHECK(members.size() > 12);
    for (const auto& [f, n] : members) {
        CAPTURE(map_to_string(f));
        PPoint h = bad_hole(f, n);
        CHECK(is_n_unstable(f, n + 1));
        CHECK(bad_hole(f, n + 1) == h);
        Decomposition D = decompose(f);
        Depth dh = point_order(D.h, h);
        if (D.induced_degree() >= 1) {
            CHECK(2 * dh + local_multiplicity(D.induced, h) > D.d);
            // Orbit of the bad hole (steps 1..n) avoiding all holes forces depth (d+1)/2.
            bool misses = true;
            PPoint w = h;
            for (int k = 1; k <= n; ++k) {
                w = apply(D.induced, w);
                if (point_order(D.h, w) > 0) misses = false;
            }
            if (misses) CHECK(2 * dh == D.d + 1);
        } else {
            CHECK(2 * dh == D.d + 1);
        }
    }
}

TEST_CASE("git_equal_stable") {
    Map S5 = cat("S5");
    CHECK(git_equal_stable(S5, S5));
    std::mt19937 rng(31);
    for (int it = 0; it < 10; ++it) {
        Map M = random_mobius(rng);
        Map c = conjugate(S5, M);
        CHECK(git_equal_stable(S5, c));
        CHECK(git_equal_stable(c, S5));
    }
    // Same hole depths, different cross-ratio of the depth-1 holes.
    Map other = map_from_ints({0, 0, 0, 0, 0, 0}, {0, -3, 7, -5, 1, 0});  // XY(X-Y)^2(X-3Y)
    CHECK(is_stable(other));
    CHECK(!git_equal_stable(S5, other));
    CHECK_THROWS_AS(git_equal_stable(S5, cat("G3")), DegreeMismatch);
    CHECK_THROWS_AS(git_equal_stable(cat("F3"), cat("F3")), NotStable);
}

TEST_CASE("git_equal_stable on two-hole maps") {
    // X Y * [X^2 + 2Y^2 : X Y]: holes 0, inf (depth 1 each), degree 4.
    Map g = canonical(Map{Poly::monomial(1, 1) * Poly({GaussRat(2), GaussRat(0), GaussRat(1)}),
                          Poly::monomial(1, 1) * Poly::monomial(1, 1)});
    REQUIRE(is_stable(g));
    Map scaled = conjugate(g, mobius(GaussRat(3), GaussRat(0), GaussRat(0), GaussRat(1)));
    CHECK(git_equal_stable(g, scaled));
    Map swapped = conjugate(g, mobius(GaussRat(0), GaussRat(1), GaussRat(1), GaussRat(0)));
    CHECK(git_equal_stable(g, swapped));
    Map moved = conjugate(g, mobius(GaussRat(2), GaussRat(1), GaussRat(1), GaussRat(1)));
    CHECK(git_equal_stable(g, moved));
    Map diff = canonical(Map{Poly::monomial(1, 1) * Poly({GaussRat(2), GaussRat(1), GaussRat(1)}),
                             Poly::monomial(1, 1) * Poly::monomial(1, 1)});
    REQUIRE(is_stable(diff));
    CHECK(!git_equal_stable(g, diff));
}
