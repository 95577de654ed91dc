// Deterministic random generators shared by the unit and acceptance tests.
#pragma once

#include "degmap/berkspace.hpp"
#include "degmap/catalog.hpp"
#include "degmap/projmap.hpp"

#include <algorithm>
#include <random>

namespace testsupport {

using namespace degmap;

inline GaussRat small_gauss(std::mt19937& rng, int range = 3, bool allow_imag = true) {
    std::uniform_int_distribution<int> v(-range, range), coin(0, 3);
    int im = (allow_imag && coin(rng) == 0) ? v(rng) : 0;
    return {Rational(v(rng)), Rational(im)};
}

inline PPoint random_point(std::mt19937& rng) {
    std::uniform_int_distribution<int> coin(0, 6);
    if (coin(rng) == 0) return PPoint::infinity();
    return PPoint::at(small_gauss(rng));
}

inline Poly random_poly(std::mt19937& rng, int deg) {
    Poly p = Poly::zero(deg);
    for (auto& c : p.c) c = small_gauss(rng);
    return p;
}

/// Coprime pair of degree e >= 1, sometimes monomial-like so hole orbits interact.
inline Map random_induced(std::mt19937& rng, int e) {
    std::uniform_int_distribution<int> kind(0, 3);
    for (;;) {
        Map g;
        switch (kind(rng)) {
            case 0:  // c z^e
                g = {Poly::monomial(e, 0, small_gauss(rng, 2, false)), Poly::monomial(0, e)};
                break;
            case 1:  // c z^{-e}
                g = {Poly::monomial(0, e, small_gauss(rng, 2, false)), Poly::monomial(e, 0)};
                break;
            default:
                g = {random_poly(rng, e), random_poly(rng, e)};
        }
        if (g.p.is_zero() || g.q.is_zero()) continue;
        if (resultant(g.p, g.q).is_zero()) continue;
        return canonical(g);
    }
}

/// Degree-d map H * g with planted holes; never in I(d).
inline Map planted_map(std::mt19937& rng, int d) {
    std::uniform_int_distribution<int> hdeg(1, d);
    for (;;) {
        int delta = hdeg(rng);
        Poly H = Poly::constant(GaussRat(1));
        std::vector<PPoint> used;
        int left = delta;
        while (left > 0) {
            PPoint z = random_point(rng);
            if (std::find(used.begin(), used.end(), z) != used.end()) continue;
            used.push_back(z);
            std::uniform_int_distribution<int> m(1, left);
            int k = m(rng);
            H = H * linear_form(z).pow(k);
            left -= k;
        }
        int e = d - delta;
        Map g;
        if (e == 0) {
            PPoint c = random_point(rng);
            g = {Poly::constant(c.x()), Poly::constant(c.y())};
        } else {
            g = random_induced(rng, e);
        }
        Map f = canonical(Map{H * g.p, H * g.q});
        if (is_in_Id(f)) continue;
        return f;
    }
}

/// Literal n-th iterate over the Puiseux field.
inline TMap iterate(const TMap& f, int n) {
    TMap g = f;
    for (int k = 1; k < n; ++k) g = f.compose(g);
    return g;
}

inline Map random_nondegenerate(std::mt19937& rng, int d) { return random_induced(rng, d); }

inline Map random_mobius(std::mt19937& rng) {
    for (;;) {
        GaussRat a = small_gauss(rng, 3, false), b = small_gauss(rng, 3, false), c = small_gauss(rng, 3, false),
                 dd = small_gauss(rng, 3, false);
        if ((a * dd - b * c).is_zero()) continue;
        return mobius(a, b, c, dd);
    }
}

/// Short Puiseux polynomial with exponents in {0, 1/2, 1, 3/2, 2}.
inline TPoly random_tpoly(std::mt19937& rng, int max_terms = 2) {
    std::uniform_int_distribution<int> nterms(0, max_terms), ex(0, 4);
    TPoly r;
    int k = nterms(rng);
    for (int i = 0; i < k; ++i) r += TPoly::monomial(small_gauss(rng, 2), make_rat(ex(rng), 2));
    return r;
}

inline TypeIIPoint random_type2(std::mt19937& rng) {
    std::uniform_int_distribution<int> a(-2, 4);
    return {random_tpoly(rng), make_rat(a(rng), 2)};
}

/// Rational function of degree d with disjoint zero and pole sets.
inline FactoredRat random_factored(std::mt19937& rng, int d) {
    for (;;) {
        FactoredRat f;
        f.unit = TPoly::monomial(small_gauss(rng, 2, false), make_rat(std::uniform_int_distribution<int>(-1, 1)(rng), 1));
        if (f.unit.is_zero()) continue;
        std::vector<TPoly> used;
        bool ok = true;
        std::uniform_int_distribution<int> coin(0, 2);
        // One side may have degree d - 1: a zero or pole at infinity.
        int nz = d, np = d;
        if (coin(rng) == 0) nz = d - 1;
        else if (coin(rng) == 0) np = d - 1;
        for (int k = 0; k < nz + np; ++k) {
            TPoly r = random_tpoly(rng);
            for (const auto& u : used)
                if (u == r) ok = false;
            used.push_back(r);
            (k < nz ? f.zeros : f.poles).push_back({r, 1});
        }
        if (!ok || f.degree() != d) continue;
        return f;
    }
}

}  // namespace testsupport
