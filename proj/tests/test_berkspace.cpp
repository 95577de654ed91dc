#include "degmap/berkspace.hpp"
#include "support.hpp"

#include "doctest.h"

using namespace degmap;
using namespace testsupport;

namespace {

TPoly tp(long c) { return TPoly(c); }
TPoly tt(long num, long den = 1) { return TPoly::t(make_rat(num, den)); }
TypeIIPoint pt2(const TPoly& c, long num, long den = 1) { return {c, make_rat(num, den)}; }

/// Directions worth probing at xi: Out, a few residues, and every direction carrying surplus.
std::vector<Direction> probes(const std::vector<TangentData>& tds) {
    std::vector<Direction> v{Direction::outward(), Direction::res(GaussRat(0)), Direction::res(GaussRat(1)),
                             Direction::res(GaussRat(-2))};
    for (const auto& td : tds)
        for (const auto& [d, s] : surplus_directions(td)) v.push_back(d);
    return v;
}

}  // namespace

TEST_CASE("type II points: canonical center, containment, join, directions") {
    TypeIIPoint a(tp(1) + tt(1) + tt(3), make_rat(2, 1));
    CHECK(a.center() == tp(1) + tt(1));
    CHECK(TypeIIPoint::gauss().contains(a));
    CHECK(!a.contains(TypeIIPoint::gauss()));
    CHECK(join(a, TypeIIPoint::gauss()) == TypeIIPoint::gauss());
    CHECK(join(pt2(tt(1), 2), pt2(tt(1) * GaussRat(2), 3)) == pt2(TPoly(), 1));
    CHECK(direction_of(TypeIIPoint::gauss(), a) == Direction::res(GaussRat(1)));
    CHECK(direction_of(a, TypeIIPoint::gauss()) == Direction::outward());
    CHECK(direction_of(pt2(TPoly(), 1), tt(1) * GaussRat(3) + tt(2)) == Direction::res(GaussRat(3)));
    CHECK(direction_of(pt2(TPoly(), 1), tt(1, 2)) == Direction::outward());
    CHECK_THROWS(direction_of(a, a));
    CHECK(TypeIIPoint::chi(make_rat(3, 2)).alpha() == make_rat(-3, 2));
}

TEST_CASE("leading form and image examples") {
    const TMap z2 = lift(map_from_ints({0, 0, 1}, {1, 0, 0}));
    auto td = image_and_tangent(z2, TypeIIPoint::gauss());
    CHECK(td.image == TypeIIPoint::gauss());
    CHECK(td.local_degree == 2);
    td = image_and_tangent(z2, TypeIIPoint::chi(1));
    CHECK(td.image == TypeIIPoint::chi(2));

    // z + 1 at xi(0, |t|): image xi(1, |t|), tangent c -> c.
    const TMap shift = lift(mobius(1, 1, 0, 1));
    td = image_and_tangent(shift, pt2(TPoly(), 1));
    CHECK(td.image == pt2(tp(1), 1));
    CHECK(td.tangent == mobius(1, 0, 0, 1));

    // 1/(1 - z) at xi(0, |t|) -> xi(1, |t|) after peeling the constant term.
    const TMap inv = lift(mobius(0, 1, -1, 1));
    td = image_and_tangent(inv, pt2(TPoly(), 1));
    CHECK(td.image == pt2(tp(1), 1));
    CHECK(td.local_degree == 1);

    // (z^2 + t)/z: Gauss reduction z, surplus 1 towards 0.
    TMap f{TPolyH({tt(1), TPoly(), tp(1)}), TPolyH({TPoly(), tp(1), TPoly()})};
    td = image_and_tangent(f, TypeIIPoint::gauss());
    CHECK(td.image == TypeIIPoint::gauss());
    CHECK(td.local_degree == 1);
    CHECK(surplus(td, Direction::res(GaussRat(0))) == 1);
    CHECK(surplus(td, Direction::outward()) == 0);
    CHECK(surplus(td, Direction::res(GaussRat(5))) == 0);
    CHECK_NOTHROW(check_surplus_sum(td));
    auto [f0, ind] = gauss_reduction(f);
    CHECK(depth(f0, PPoint::at(GaussRat(0))) == 1);
    CHECK(ind == mobius(1, 0, 0, 1));
    // On the small disk xi(0, |t|^{1/2}) the map is degree 2 with image chi(1/2).
    td = image_and_tangent(f, pt2(TPoly(), 1, 2));
    CHECK(td.local_degree == 2);
    CHECK(td.image == pt2(TPoly(), 1, 2));

    CHECK_THROWS_AS(image_and_tangent(TMap{TPolyH({tp(1), TPoly()}), TPolyH({tp(1), TPoly()})}, TypeIIPoint::gauss()),
                    ConstantLeadingForm);
}

TEST_CASE("complex maps act by z -> g(z), radius^m; surplus sits on the Gauss side") {
    set_surplus_checks(true);
    std::mt19937 rng(11);
    int checked = 0;
    for (int it = 0; it < 60; ++it) {
        Map g = random_nondegenerate(rng, 1 + it % 3);
        PPoint z = PPoint::at(small_gauss(rng));
        PPoint gz = apply(g, z);
        if (gz.inf) continue;
        const int m = local_multiplicity(g, z);
        const Rational alpha = make_rat(1 + it % 4, 2);
        auto td = image_and_tangent(lift(g), TypeIIPoint(TPoly(z.z), alpha));
        CHECK(td.image == TypeIIPoint(TPoly(gz.z), alpha * m));
        CHECK(td.local_degree == m);
        CHECK(tangent_image(td, Direction::res(GaussRat(0))) == Direction::res(GaussRat(0)));
        CHECK(directional_multiplicity(td, Direction::res(GaussRat(1))) == 1);
        CHECK(directional_multiplicity(td, Direction::res(GaussRat(0))) == m);
        CHECK(surplus(td, Direction::res(GaussRat(1))) == 0);
        CHECK(surplus(td, Direction::outward()) == g.degree() - m);
        ++checked;
    }
    CHECK(checked > 30);
}

TEST_CASE("surplus-sum identity on random maps and points") {
    set_surplus_checks(true);
    const long long before = surplus_checks_performed();
    std::mt19937 rng(5);
    for (int it = 0; it < 80; ++it) {
        FactoredRat f = random_factored(rng, 1 + it % 3);
        TypeIIPoint xi = random_type2(rng);
        auto td = image_and_tangent(f, xi);
        long long s = td.local_degree;
        for (const auto& [v, k] : surplus_directions(td)) s += k;
        // Surplus off Q(i) residues is impossible here: every zero and pole has a Q(i) residue.
        CHECK(s == f.degree());
        CHECK(td.local_degree >= 1);
    }
    CHECK(surplus_checks_performed() - before >= 80);
}

TEST_CASE("composition law for surplus, image and tangent map") {
    set_surplus_checks(true);
    std::mt19937 rng(2024);
    int pairs = 0;
    for (; pairs < 50; ++pairs) {
        FactoredRat fphi = random_factored(rng, 1 + pairs % 2), fpsi = random_factored(rng, 2);
        const TMap phi = fphi.expand(), psi = fpsi.expand();
        const TMap comp = psi.compose(phi);
        for (int k = 0; k < 5; ++k) {
            TypeIIPoint xi = random_type2(rng);
            auto tphi = image_and_tangent(phi, xi);
            auto tpsi = image_and_tangent(psi, tphi.image);
            auto tcomp = image_and_tangent(comp, xi);
            CHECK(tcomp.image == tpsi.image);
            CHECK(tcomp.tangent == canonical(tpsi.tangent.compose(tphi.tangent)));
            for (const auto& v : probes({tphi, tcomp})) {
                const Direction w = tangent_image(tphi, v);
                CHECK(surplus(tcomp, v) ==
                      psi.degree() * surplus(tphi, v) + surplus(tpsi, w) * directional_multiplicity(tphi, v));
                CHECK(directional_multiplicity(tcomp, v) ==
                      directional_multiplicity(tpsi, w) * directional_multiplicity(tphi, v));
            }
        }
    }
    CHECK(pairs == 50);
}

TEST_CASE("surplus_iterate matches the literal iterate") {
    std::mt19937 rng(77);
    for (int it = 0; it < 15; ++it) {
        const TMap phi = random_factored(rng, 2).expand();
        const int n = 2 + it % 2;
        const TMap phin = iterate(phi, n);
        for (int k = 0; k < 3; ++k) {
            TypeIIPoint xi = random_type2(rng);
            auto direct = image_and_tangent(phin, xi);
            for (const auto& v : probes({direct})) {
                SurplusIterate r = surplus_iterate(phi, xi, v, n);
                CHECK(r.orbit.back() == direct.image);
                CHECK(r.surplus == surplus(direct, v));
                CHECK(r.mult == directional_multiplicity(direct, v));
                CHECK(r.directions.back() == tangent_image(direct, v));
            }
        }
    }
}

TEST_CASE("reduce_iterate_at agrees with reduce_at") {
    std::mt19937 rng(8);
    for (int it = 0; it < 12; ++it) {
        const TMap phi = random_factored(rng, 2).expand();
        const TypeIIPoint zeta = random_type2(rng);
        const TMap M = affine_chart(zeta);
        for (int n = 1; n <= 2; ++n) CHECK(reduce_iterate_at(phi, n, M) == reduce_at(iterate(phi, n), M));
    }
    // M^{-1} ∘ M is the identity.
    const TMap M = affine_chart(pt2(tp(2) + tt(1, 2), 3, 2));
    CHECK(coefficient_reduction(tmap_inverse(M).compose(M)) == coefficient_reduction(identity_tmap()));
}

TEST_CASE("hole depths of reductions equal surplus predictions") {
    set_surplus_checks(true);
    std::mt19937 rng(31);
    int holes = 0, clusters = 0;
    for (int it = 0; it < 40; ++it) {
        const TMap phi = random_factored(rng, 2).expand();
        const TypeIIPoint zeta = random_type2(rng);
        const int n = 1 + it % 2;
        Map f = reduce_iterate_at(phi, n, affine_chart(zeta));
        Decomposition D = decompose(f);
        long long total = 0;
        for (const auto& h : D.holes) {
            ++holes;
            auto preds = depths_via_surplus(phi, zeta, n, h.factor);
            for (const auto& p : preds) {
                CHECK(p.depth == h.depth);
                total += p.depth * p.factor.degree();
            }
            if (h.split) {
                CHECK(depths_via_surplus(phi, zeta, n, Direction::from_point(h.point)) == h.depth);
            } else {
                ++clusters;
            }
        }
        CHECK(total == f.degree() - D.induced_degree());
        // A direction that is not a hole predicts depth 0.
        for (long c = 7; c <= 8; ++c)
            if (depth(f, PPoint::at(GaussRat(c))) == 0)
                CHECK(depths_via_surplus(phi, zeta, n, Direction::res(GaussRat(c))) == 0);
    }
    CHECK(holes > 20);
    MESSAGE("holes checked: " << holes << ", clusters: " << clusters);
}

TEST_CASE("cluster predictions: cube roots of unity") {
    // z^3 (z - 1 + t)/(z - 1): reduction z^3 with surplus 1 towards 1; its preimages pull back under z^3.
    FactoredRat f;
    f.zeros = {{TPoly(), 3}, {tp(1) - tt(1), 1}};
    f.poles = {{tp(1), 1}};
    const TMap phi = f.expand();
    Map red = reduce_iterate_at(phi, 2, identity_tmap());
    Decomposition D = decompose(red);
    int clusters = 0;
    for (const auto& h : D.holes) {
        clusters += !h.split;
        for (const auto& p : depths_via_surplus(phi, TypeIIPoint::gauss(), 2, h.factor)) CHECK(p.depth == h.depth);
    }
    CHECK(clusters == 1);
    CHECK(depth(red, PPoint::at(GaussRat(1))) == 5);
    auto preds = depths_via_surplus(phi, TypeIIPoint::gauss(), 2, homogenize(UPoly({1, 1, 1}), 2));
    REQUIRE(preds.size() == 1);
    CHECK(preds[0].depth == 1);
    CHECK(preds[0].mult == 1);
    // An unsplit residue set is partitioned, never dropped: roots of z^3 - 1 and z^2 + 1 mixed.
    preds = depths_via_surplus(phi, TypeIIPoint::gauss(), 2, homogenize(UPoly({1, 1, 2, 1, 1}), 4));
    long long deg = 0;
    for (const auto& p : preds) deg += p.factor.degree();
    CHECK(deg == 4);
    CHECK(preds.size() == 2);
}

TEST_CASE("perturbation keeps the skeleton and adds surplus") {
    set_surplus_checks(true);
    FactoredRat phi;
    phi.zeros = {{TPoly(), 2}};
    const std::vector<TypeIIPoint> gamma{TypeIIPoint::gauss(), pt2(TPoly(), 1)};
    const std::vector<TPoly> poles{tt(1)};
    CHECK_THROWS_AS(perturb(phi, poles, gamma, 1), NTooSmall);
    auto [psi, N] = perturb_escalating(phi, poles, gamma, 1);
    CHECK(N == 2);
    CHECK(psi.degree() == 3);
    auto td = image_and_tangent(psi, TypeIIPoint::gauss());
    CHECK(surplus(td, Direction::res(GaussRat(0))) == 1);
    CHECK_THROWS_AS(perturb_escalating(phi, poles, gamma, 1, 1), NTooSmall);
}
