#include "degmap/witness.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace degmap {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

Rational R(long a, long b = 1) { return make_rat(a, b); }
std::string str(const Rational& q) { return rat_to_string(q); }
std::string str(long long v) { return std::to_string(v); }

Rational rpow(const Rational& b, long e) {
    Rational r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}

Rational dpow(long d, long e) { return rpow(Rational(d), e); }

void expect(std::vector<Check>& cs, const std::string& name, const std::string& expected, const std::string& actual) {
    cs.push_back({name, expected, actual, expected == actual});
}

void expect_true(std::vector<Check>& cs, const std::string& name, bool cond, const std::string& detail = "") {
    cs.push_back({name, "true", cond ? "true" : ("false" + (detail.empty() ? "" : " (" + detail + ")")), cond});
}

bool all_ok(const std::vector<Check>& cs) {
    return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.ok; });
}

// ---------------------------------------------------------------- TMap arithmetic

/// Shift all coefficients so the minimum valuation is 0.
TMap normalize_vals(TMap m) {
    std::optional<Rational> vmin;
    for (const auto* h : {&m.p, &m.q})
        for (const auto& x : h->c)
            if (auto v = x.val(); v && (!vmin || *v < *vmin)) vmin = v;
    if (!vmin || *vmin == 0) return m;
    for (auto* h : {&m.p, &m.q})
        for (auto& x : h->c) x = x.shift(-*vmin);
    return m;
}

/// Remove the common X^a Y^b factor of both coordinates.
TMap cancel_monomials(const TMap& m) {
    const int D = m.degree();
    int lo = 0, hi = D;
    while (lo <= D && m.p.c[lo].is_zero() && m.q.c[lo].is_zero()) ++lo;
    while (hi >= lo && m.p.c[hi].is_zero() && m.q.c[hi].is_zero()) --hi;
    if (lo > hi) throw ZeroPair("cancel_monomials: zero pair");
    if (lo == 0 && hi == D) return m;
    std::vector<TPoly> p(m.p.c.begin() + lo, m.p.c.begin() + hi + 1), q(m.q.c.begin() + lo, m.q.c.begin() + hi + 1);
    return {TPolyH(p), TPolyH(q)};
}

/// Product of rational functions.
TMap tmul(const TMap& a, const TMap& b) { return normalize_vals(cancel_monomials({a.p * b.p, a.q * b.q})); }

TMap tpow(const TMap& a, int k) {
    TMap r{TPolyH::constant(TPoly(1)), TPolyH::constant(TPoly(1))};
    for (int i = 0; i < k; ++i) r = tmul(r, a);
    return r;
}

TMap tone() { return {TPolyH::constant(TPoly(1)), TPolyH::constant(TPoly(1))}; }

/// (z - zero) / (z - pole)
TMap ratio(const TPoly& zero, const TPoly& pole) {
    return {TPolyH({-zero, TPoly(1)}), TPolyH({-pole, TPoly(1)})};
}

/// 1 + t^N/(z - p)
TMap bump_at(const TPoly& p, const Rational& N) { return ratio(p - TPoly::t(N), p); }

/// 1 + t^N z: a pole of the perturbation at infinity.
TMap bump_infinity(const Rational& N) { return {TPolyH({TPoly(1), TPoly::t(N)}), TPolyH({TPoly(1), TPoly()})}; }

/// (A + t^N Y^k)/A for a cluster A of degree k with A(1,0) != 0.
TMap bump_cluster(const Poly& A, const Rational& N) {
    TPolyH a = lift(A);
    TPolyH b = a;
    b.c[0] += TPoly::t(N);
    return {b, a};
}

TMap hole_bump(const HoleEntry& h, const Rational& N) {
    if (h.split) return h.point.inf ? bump_infinity(N) : bump_at(TPoly(h.point.z), N);
    return bump_cluster(h.factor, N);
}

/// Product of bumps over the holes not in `skip`, each to its depth.
TMap other_holes(const Decomposition& D, const std::vector<PPoint>& skip, const Rational& N) {
    TMap r = tone();
    for (const auto& h : D.holes) {
        if (h.split && std::find(skip.begin(), skip.end(), h.point) != skip.end()) continue;
        r = tmul(r, tpow(hole_bump(h, N), static_cast<int>(h.depth)));
    }
    return r;
}

Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Integer exponent_lcm(const TMap& g) {
    Integer e = 1;
    for (const auto* h : {&g.p, &g.q})
        for (const auto& x : h->c) e = lcm(e, x.exponent_denominator());
    return e;
}

/// Nonzero resultant after specializing t: the family is a degree-d map for all but finitely many t.
bool generically_nondegenerate(const TMap& g) {
    const long e = exponent_lcm(g).get_si();
    const int D = g.degree();
    for (const Rational& x0 : {R(2, 3), R(3, 7), R(5, 11), R(7, 13)}) {
        Map m{Poly::zero(D), Poly::zero(D)};
        for (int j = 0; j <= D; ++j) {
            m.p.c[j] = g.p.c[j].rescale_exponents(e).eval_integer_exponents(GaussRat(x0));
            m.q.c[j] = g.q.c[j].rescale_exponents(e).eval_integer_exponents(GaussRat(x0));
        }
        if (m.p.is_zero() || m.q.is_zero()) continue;
        if (!resultant(m.p, m.q).is_zero()) return true;
    }
    return false;
}

// ---------------------------------------------------------------- Berkovich helpers

std::vector<TypeIIPoint> orbit_of(const TMap& g, const TypeIIPoint& z0, int steps) {
    std::vector<TypeIIPoint> out{z0};
    for (int j = 0; j < steps; ++j) out.push_back(image_and_tangent(g, out.back()).image);
    return out;
}

std::vector<TypeIIPoint> hull_vertices(std::vector<TypeIIPoint> pts) {
    pts.push_back(TypeIIPoint::gauss());
    std::vector<TypeIIPoint> out;
    auto add = [&](const TypeIIPoint& p) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    for (const auto& p : pts) add(p);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) add(join(pts[i], pts[j]));
    return out;
}

/// First disagreement of images (and full tangent maps) of a and b on the vertices, or "".
std::string compare_on(const TMap& a, const TMap& b, const std::vector<TypeIIPoint>& vertices) {
    for (const auto& xi : vertices) {
        TangentData ta = image_and_tangent(a, xi), tb = image_and_tangent(b, xi);
        if (ta.image != tb.image) return "image at " + xi.to_string();
        if (ta.tangent != tb.tangent) return "tangent map at " + xi.to_string();
    }
    return "";
}

/// Images agree on the vertices; tangent images, multiplicities and surpluses agree on hull directions.
std::string compare_restricted(const TMap& a, const TMap& b, const std::vector<TypeIIPoint>& vertices) {
    for (const auto& xi : vertices) {
        TangentData ta = image_and_tangent(a, xi), tb = image_and_tangent(b, xi);
        if (ta.image != tb.image) return "image at " + xi.to_string();
        for (const auto& eta : vertices) {
            if (eta == xi) continue;
            Direction v = direction_of(xi, eta);
            if (tangent_image(ta, v) != tangent_image(tb, v))
                return "tangent image of " + v.to_string() + " at " + xi.to_string();
            if (directional_multiplicity(ta, v) != directional_multiplicity(tb, v))
                return "multiplicity of " + v.to_string() + " at " + xi.to_string();
            if (surplus(ta, v) != surplus(tb, v)) return "surplus of " + v.to_string() + " at " + xi.to_string();
        }
    }
    return "";
}

Map identity_map() { return mobius(1, 0, 0, 1); }

/// Composite tangent map of g^k at z0 (residue coordinates of affine charts).
Map composite_tangent(const TMap& g, TypeIIPoint z, int k) {
    Map T = identity_map();
    for (int j = 0; j < k; ++j) {
        TangentData td = image_and_tangent(g, z);
        T = canonical(td.tangent.compose(T));
        z = td.image;
    }
    return T;
}

/// Square-free polynomial of the finite roots of T(w) = u (u finite or infinity).
std::optional<Poly> preimage_factor(const Map& T, const PPoint& u) {
    Poly P = T.p.scaled(u.y()) - T.q.scaled(u.x());
    UPoly up = dehomogenize(P);
    if (up.degree() < 1) return std::nullopt;
    UPoly sf(GaussRat(1));
    for (const auto& [fac, m] : squarefree(up)) sf = sf * fac;
    return homogenize(sf.monic(), sf.degree());
}

/// Proportional predicted depth of every piece of the roots of `factor`; all pieces must agree.
std::optional<Rational> uniform_prop_depth(const TMap& g, const TypeIIPoint& z0, int n, const Poly& factor) {
    auto preds = depths_via_surplus(g, z0, n, factor);
    std::optional<Rational> out;
    const Rational dn = dpow(g.degree(), n);
    for (const auto& p : preds) {
        Rational q = Rational(static_cast<long>(p.depth)) / dn;
        if (out && *out != q) return std::nullopt;
        out = q;
    }
    return out;
}

Rational prop_depth_dir(const TMap& g, const TypeIIPoint& z0, int n, const Direction& v) {
    return Rational(static_cast<long>(depths_via_surplus(g, z0, n, v))) / dpow(g.degree(), n);
}

std::string opt_str(const std::optional<Rational>& q) { return q ? str(*q) : "non-uniform"; }

/// Records the prediction for the roots of T^k(w) = u at z0 against a formula.
void expect_preimage_depth(std::vector<Check>& cs, const std::string& name, const TMap& g, const TypeIIPoint& z0,
                           int n, int k, const PPoint& u, const Rational& formula, long long expected_count) {
    Map T = composite_tangent(g, z0, k);
    auto fac = preimage_factor(T, u);
    if (!fac) {
        expect(cs, name, str(formula), "no finite preimages");
        return;
    }
    expect(cs, name, str(formula), opt_str(uniform_prop_depth(g, z0, n, *fac)));
    if (expected_count >= 0) expect(cs, name + " (count)", str(expected_count), str(static_cast<long long>(fac->degree())));
}

// ---------------------------------------------------------------- normalization

struct Setup {
    Map input;
    Map normalizer;
    Map base;
    Decomposition D;
    CaseTag tag;
    int d = 0;
};

Setup make_setup(const Map& f, int n, const Map& N) {
    Setup s;
    s.input = canonical(f);
    s.normalizer = N;
    s.base = conjugate(s.input, N);
    s.D = decompose(s.base);
    s.tag = classify_case(s.base, n);
    s.d = s.base.degree();
    return s;
}

/// Forward orbit h_0..h_{count-1} under the induced map.
std::vector<PPoint> point_orbit(const Map& fh, PPoint h, int count) {
    std::vector<PPoint> out{h};
    while (static_cast<int>(out.size()) < count) out.push_back(apply(fh, out.back()));
    return out;
}

/// Möbius M with M(0) = h0 and M(infinity) = z0, where z0 avoids the orbit (and preferably the holes).
Map normalizer_finite_orbit(const Map& f, int n) {
    Decomposition D = decompose(f);
    CaseTag tag = classify_case(f, n);
    const PPoint h0 = tag.bad_hole;
    std::vector<PPoint> orb = point_orbit(D.induced, h0, 2 * n + 2);
    bool inf_in = std::find(orb.begin(), orb.end(), PPoint::infinity()) != orb.end();
    if (!inf_in) return mobius(1, h0.z, 0, 1);
    std::vector<PPoint> holes;
    for (const auto& h : D.holes)
        if (h.split) holes.push_back(h.point);
    std::optional<PPoint> z0, fallback;
    for (long k = 1; k < 64 && !z0; ++k)
        for (long s : {k, -k}) {
            PPoint c = PPoint::at(GaussRat(s));
            if (std::find(orb.begin(), orb.end(), c) != orb.end()) continue;
            if (!fallback) fallback = c;
            if (std::find(holes.begin(), holes.end(), c) == holes.end() && point_order(D.h, c) == 0) {
                z0 = c;
                break;
            }
        }
    if (!z0) z0 = fallback;
    if (!z0) throw OrbitNotSplit("no integer point outside the bad-hole orbit");
    if (h0.inf) return mobius(z0->z, 1, 1, 0);
    return mobius(z0->z, h0.z, 1, 1);
}

// ---------------------------------------------------------------- skeletons

Certificate skeleton(const Setup& s, int n) {
    Certificate c;
    c.input = s.input;
    c.n = n;
    c.kind = s.tag.kind;
    c.normalizer = s.normalizer;
    c.base = s.base;
    return c;
}

std::vector<GaussRat> usable_lambdas(const std::vector<GaussRat>& lambdas) {
    std::vector<GaussRat> out;
    for (const auto& l : lambdas)
        if (!l.is_zero() && !l.is_one() && std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    if (out.size() < 2) throw std::invalid_argument("at least two lambda samples outside {0,1} are required");
    return out;
}

/// Deterministic replacement samples when a lambda violates a genericity condition.
GaussRat next_lambda(const std::vector<GaussRat>& used) {
    for (long k = 7;; ++k) {
        GaussRat c(k);
        if (std::find(used.begin(), used.end(), c) == used.end()) return c;
    }
}

/// Escalate N (doubling) until the attempt's checks all hold; returns the last attempt otherwise.
template <class Attempt>
FamilySpec escalate(Rational N0, Attempt attempt, Rational cap = 4096) {
    FamilySpec last;
    for (Rational N = N0; N <= cap; N *= 2) {
        last = attempt(N);
        if (all_ok(last.checks)) return last;
    }
    return last;
}

}  // namespace

std::vector<GaussRat> default_lambdas() { return {GaussRat(2), GaussRat(3), GaussRat(5)}; }

// ---------------------------------------------------------------- ledgers

std::vector<LedgerEntry> surplus_ledger(const TMap& g, const TypeIIPoint& zeta0, int n, const Map& limit) {
    std::vector<LedgerEntry> out;
    Decomposition D = decompose(limit);
    for (const auto& h : D.holes) {
        for (const auto& p : depths_via_surplus(g, zeta0, n, h.factor)) {
            LedgerEntry e;
            e.factor = p.factor;
            e.depth = h.depth;
            e.predicted = p.depth;
            e.source = "surplus";
            e.ok = p.depth == h.depth;
            out.push_back(e);
        }
    }
    return out;
}

namespace {

std::vector<LedgerEntry> closed_form_ledger(const Map& limit, const Map& closed) {
    std::vector<LedgerEntry> out;
    Decomposition D = decompose(limit), C = decompose(closed);
    for (const auto& h : D.holes) {
        LedgerEntry e;
        e.factor = h.factor;
        e.depth = h.depth;
        e.source = "closed-form";
        for (const auto& c : C.holes)
            if (c.factor == h.factor) e.predicted = c.depth;
        e.ok = e.predicted == e.depth;
        out.push_back(e);
    }
    return out;
}

LimitRecord compute_limit(const FamilySpec& fam, int idx, int sample, int n) {
    LimitRecord r;
    r.family = idx;
    r.sample = sample;
    const TMap& g = fam.maps[sample];
    if (fam.degenerate) {
        TMap it = g;
        for (int k = 1; k < n; ++k) it = g.compose(it);
        r.limit = reduce_at(it, fam.conjugator);
        if (fam.closed_form_limit) r.ledger = closed_form_ledger(r.limit, *fam.closed_form_limit);
    } else {
        r.limit = reduce_iterate_at(g, n, fam.conjugator);
        r.ledger = surplus_ledger(g, fam.zeta0, n, r.limit);
    }
    r.semistable = is_semistable(r.limit);
    r.stable = is_stable(r.limit);
    return r;
}

std::string fp_string(const Fingerprint& fp) {
    std::string s = "{";
    for (std::size_t i = 0; i < fp.depths.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(fp.depths[i].first);
        if (fp.depths[i].second > 1) s += "x" + std::to_string(fp.depths[i].second);
    }
    return s + "}/" + std::to_string(fp.induced_degree);
}

/// Decides non-equality of two limits; returns the reason or nullopt if undecided/equal.
std::optional<std::string> distinct_reason(const LimitRecord& a, const LimitRecord& b) {
    if (a.semistable && b.semistable && a.stable != b.stable)
        return std::string("stable vs strictly semistable (the stable locus is a union of classes)");
    if (a.stable && b.stable) {
        try {
            if (!git_equal_stable(a.limit, b.limit)) return std::string("git_equal_stable = false");
            return std::nullopt;
        } catch (const std::exception&) {
        }
        Fingerprint fa = fingerprint(a.limit), fb = fingerprint(b.limit);
        if (!(fa == fb)) return "depth multisets differ: " + fp_string(fa) + " vs " + fp_string(fb);
    }
    return std::nullopt;
}

struct Distinctness {
    bool ok = false;
    std::string method;
    std::vector<std::string> details;
};

std::string sample_name(const Certificate& c, const LimitRecord& r) {
    const FamilySpec& f = c.families[r.family];
    std::string s = f.label;
    if (!f.lambdas.empty()) s += "[lambda=" + f.lambdas[r.sample].to_string() + "]";
    return s;
}

Distinctness assess_distinctness(const Certificate& c) {
    Distinctness out;
    // A lambda family with at least two samples: all pairs must be distinct.
    for (std::size_t fi = 0; fi < c.families.size(); ++fi) {
        if (c.families[fi].maps.size() < 2) continue;
        std::vector<const LimitRecord*> ls;
        for (const auto& r : c.limits)
            if (r.family == static_cast<int>(fi)) ls.push_back(&r);
        out.method = "pairwise non-equal classes across lambda samples";
        out.ok = ls.size() >= 2;
        for (std::size_t i = 0; i < ls.size(); ++i)
            for (std::size_t j = i + 1; j < ls.size(); ++j) {
                auto why = distinct_reason(*ls[i], *ls[j]);
                out.details.push_back(sample_name(c, *ls[i]) + " vs " + sample_name(c, *ls[j]) + ": " +
                                      (why ? *why : "NOT certified distinct"));
                out.ok = out.ok && why.has_value();
            }
        return out;
    }
    if (c.limits.size() >= 2) {
        const LimitRecord &a = c.limits[0], &b = c.limits[1];
        auto why = distinct_reason(a, b);
        out.method = "two families with non-equal limit classes";
        out.details.push_back(sample_name(c, a) + " vs " + sample_name(c, b) + ": " +
                              (why ? *why : "NOT certified distinct"));
        out.details.push_back("depth multisets " + fp_string(fingerprint(a.limit)) + " and " +
                              fp_string(fingerprint(b.limit)));
        if (c.kind == CaseKind::ConstantInduced && c.families[a.family].degenerate) {
            // Both limits have constant induced map [0:1]; the depth at that value is a conjugacy invariant.
            const PPoint zero = PPoint::at(GaussRat(0));
            Depth da = depth(a.limit, zero), db = depth(b.limit, zero);
            out.details.push_back("depth at the constant value 0: " + std::to_string(da) + " vs " + std::to_string(db));
            if (!why && da != db && a.stable && b.stable) why = "d_0 mismatch";
        }
        out.ok = why.has_value();
        return out;
    }
    out.method = "insufficient limits";
    return out;
}

std::string report_name(const Certificate& c, const LimitRecord& r) { return sample_name(c, r); }

}  // namespace

// ---------------------------------------------------------------- verification

VerificationReport verify_certificate(const Certificate& c) {
    VerificationReport rep;
    auto pass = [&](const std::string& s) { rep.passed.push_back(s); };
    auto fail = [&](const std::string& s) { rep.failures.push_back(s); };
    try {
        const int n = c.n;
        const int d = c.base.degree();
        if (!is_semistable(c.input)) fail("input is not semistable");
        // The input is conjugate to the base, possibly through GIT identifications.
        Map normalized = conjugate(canonical(c.input), c.normalizer);
        std::vector<std::pair<Map, Map>> edges;
        for (const auto& id : c.identifications) {
            Map got = reduce_at(lift(id.from), id.conjugator);
            if (got != id.limit) fail("identification '" + id.note + "': reduction differs from the recorded limit");
            else if (!is_semistable(id.from) || !is_semistable(id.limit))
                fail("identification '" + id.note + "': endpoints not semistable");
            else {
                pass("identification '" + id.note + "'");
                edges.push_back({id.from, id.limit});
            }
        }
        {
            std::vector<Map> reach{normalized};
            for (bool grew = true; grew;) {
                grew = false;
                for (const auto& [a, b] : edges) {
                    bool ha = std::find(reach.begin(), reach.end(), a) != reach.end();
                    bool hb = std::find(reach.begin(), reach.end(), b) != reach.end();
                    if (ha != hb) {
                        reach.push_back(ha ? b : a);
                        grew = true;
                    }
                }
            }
            if (std::find(reach.begin(), reach.end(), c.base) == reach.end())
                fail("base map is not identified with the normalized input");
            else pass("base identified with the normalized input");
        }
        for (std::size_t fi = 0; fi < c.families.size(); ++fi) {
            const FamilySpec& fam = c.families[fi];
            const std::string tag = "family " + fam.label;
            for (const auto& ch : fam.checks)
                if (!ch.ok) fail(tag + " check '" + ch.name + "': expected " + ch.expected + ", got " + ch.actual);
            if (all_ok(fam.checks)) pass(tag + ": " + std::to_string(fam.checks.size()) + " construction checks");
            if (!fam.lambdas.empty() && fam.lambdas.size() != fam.maps.size()) fail(tag + ": sample count mismatch");
            for (std::size_t s = 0; s < fam.maps.size(); ++s) {
                const TMap& g = fam.maps[s];
                if (g.degree() != d) fail(tag + ": degree " + std::to_string(g.degree()) + " != " + std::to_string(d));
                else if (coefficient_reduction(g) != c.base) fail(tag + ": Gauss reduction differs from the base map");
                else if (!fam.degenerate && !generically_nondegenerate(g)) fail(tag + ": family is degenerate");
                else pass(tag + " sample " + std::to_string(s) + ": Gauss reduction equals the base map");
            }
            if (!fam.degenerate && fam.conjugator != affine_chart(fam.zeta0))
                fail(tag + ": conjugator is not the chart of zeta0");
            // Restricted lambda-independence on the hull of the orbit of zeta0.
            if (fam.maps.size() >= 2 && !fam.degenerate) {
                auto orb = orbit_of(fam.maps[0], fam.zeta0, n);
                auto verts = hull_vertices(orb);
                bool ok = true;
                for (std::size_t s = 1; s < fam.maps.size() && ok; ++s) {
                    if (orbit_of(fam.maps[s], fam.zeta0, n) != orb) {
                        fail(tag + ": orbit of zeta0 depends on lambda");
                        ok = false;
                        break;
                    }
                    std::string why = compare_restricted(fam.maps[0], fam.maps[s], verts);
                    if (!why.empty()) {
                        fail(tag + ": segment action depends on lambda (" + why + ")");
                        ok = false;
                    }
                }
                if (ok) pass(tag + ": segment action independent of lambda on " + std::to_string(verts.size()) + " hull vertices");
            }
        }
        // Limits and ledgers.
        std::size_t expected_limits = 0;
        for (const auto& f : c.families) expected_limits += f.maps.size();
        if (c.limits.size() != expected_limits) fail("limit count mismatch");
        const Depth dn = [&] {
            Depth r = 1;
            for (int i = 0; i < n; ++i) r *= d;
            return r;
        }();
        for (const auto& rec : c.limits) {
            if (rec.family < 0 || rec.family >= static_cast<int>(c.families.size()) || rec.sample < 0 ||
                rec.sample >= static_cast<int>(c.families[rec.family].maps.size())) {
                fail("limit record out of range");
                continue;
            }
            const FamilySpec& fam = c.families[rec.family];
            const std::string tag = "limit " + report_name(c, rec);
            LimitRecord re = compute_limit(fam, rec.family, rec.sample, n);
            if (re.limit != rec.limit) fail(tag + ": recomputed limit differs");
            else pass(tag + ": limit recomputed exactly");
            if (re.semistable != rec.semistable || re.stable != rec.stable) fail(tag + ": recorded verdict differs");
            if (!re.semistable) fail(tag + ": limit not semistable");
            if (fam.claims_stable && !re.stable) fail(tag + ": limit not stable");
            if (re.semistable && (!fam.claims_stable || re.stable))
                pass(tag + (re.stable ? ": stable" : ": semistable"));
            if (fam.closed_form_limit && re.limit != *fam.closed_form_limit) fail(tag + ": differs from the closed form");
            // Ledger: recomputed, complete, matching the record.
            if (re.ledger.size() != rec.ledger.size()) fail(tag + ": ledger size differs");
            for (std::size_t i = 0; i < std::min(re.ledger.size(), rec.ledger.size()); ++i) {
                const LedgerEntry &a = re.ledger[i], &b = rec.ledger[i];
                if (a.factor != b.factor || a.depth != b.depth || a.predicted != b.predicted || a.ok != b.ok)
                    fail(tag + ": ledger entry " + std::to_string(i) + " (" + poly_to_string(b.factor) +
                         ") differs from recomputation");
                if (!a.ok)
                    fail(tag + ": ledger entry " + std::to_string(i) + " (" + poly_to_string(a.factor) + ") depth " +
                         std::to_string(a.depth) + " != predicted " + std::to_string(a.predicted));
            }
            Decomposition D = decompose(re.limit);
            Depth mass = 0, predicted_mass = 0;
            for (const auto& h : D.holes) mass += h.depth * h.cluster_degree();
            for (const auto& e : re.ledger) predicted_mass += e.predicted * e.factor.degree();
            if (mass != dn - D.induced_degree()) fail(tag + ": depth mass " + std::to_string(mass) + " != d^n - deg");
            else if (predicted_mass != mass) fail(tag + ": ledger mass " + std::to_string(predicted_mass) + " != " + std::to_string(mass));
            else pass(tag + ": ledger complete, mass " + std::to_string(mass));
        }
        Distinctness dist = assess_distinctness(c);
        if (dist.method != c.distinctness || dist.details != c.distinctness_details)
            fail("distinctness record differs from recomputation");
        if (!dist.ok) fail("limits not certified distinct: " + dist.method);
        else pass("distinct: " + dist.method);
    } catch (const std::exception& e) {
        fail(std::string("exception during verification: ") + e.what());
    }
    rep.valid = rep.failures.empty();
    return rep;
}

// ---------------------------------------------------------------- Case 4

namespace {

/// c-pair (z - c2)/(z - c1) with c1 = t^{-K}, c2 = t^{-K} + 1, normalized.
TMap far_pair(const Rational& K) {
    TPoly tk = TPoly::t(K);
    return {TPolyH({-(TPoly(1) + tk), tk}), TPolyH({-TPoly(1), tk})};
}

/// 1/(1 - a t^N z) as a TMap.
TMap inv_linear(const GaussRat& a, const Rational& N) {
    return {TPolyH({TPoly(1), TPoly()}), TPolyH({TPoly(1), -TPoly::monomial(a, N)})};
}

/// (1 - a t^N z) as a TMap.
TMap linear(const GaussRat& a, const Rational& N) {
    return {TPolyH({TPoly(1), -TPoly::monomial(a, N)}), TPolyH({TPoly(1), TPoly()})};
}

Rational max_radius(const std::vector<TypeIIPoint>& pts) {
    Rational m = 0;
    for (const auto& p : pts) m = std::max(m, Rational(-p.alpha()));
    return m;
}

TypeIIPoint chi(const Rational& a) { return TypeIIPoint::chi(a); }

/// Two-family cubic construction shared by Cases 4 and 5 (poly: Case 4).
Certificate cubic_families(const Setup& s, int n, bool poly) {
    Certificate c = skeleton(s, n);
    const TMap fh = lift(s.D.induced);
    const Rational mum = mu_minus(static_cast<Depth>(rpow(3, n).get_num().get_si()));
    const Rational mup = 1 - mum;
    const Rational third = R(1, 3), two3 = R(2, 3);
    const long m = (n + 1) / 2;
    auto a_k = [&](long k) -> Rational {  // Case 5 cubic a_k
        Rational s1 = 0, s2 = 0;
        for (long j = 0; j <= k / 2; ++j) s1 += rpow(two3, 2 * j);
        for (long j = 1; j <= m - k / 2 - 1; ++j) s2 += rpow(two3, j) * rpow(third, j);
        return third * s1 + third * rpow(two3, k) * s2;
    };
    // ---- g family
    long k = -1;
    if (poly) {
        for (long kk = n - 2; kk >= 0 && k < 0; --kk)
            if (rpow(2, kk) / 2 * (1 / rpow(3, kk) + 1 / rpow(3, n)) > mum) k = kk;
    } else {
        for (long kk = 0; kk + 2 <= 2 * m - 2 && k < 0; kk += 2) {
            bool ok = (n % 2 == 0) ? (a_k(kk) < mum && mup <= a_k(kk + 2)) : (a_k(kk) <= mum && mup < a_k(kk + 2));
            if (ok) k = kk;
        }
    }
    if (k < 0) throw SelectionInfeasible("no admissible k for the cubic g-family");
    const long twok = 1L << k;
    auto attempt_g = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = s.tag.kind;
        fam.claims_stable = !poly;
        TMap phi = tmul(fh, poly ? inv_linear(1, N) : linear(1, N));
        fam.zeta0 = chi(N / twok);
        fam.conjugator = affine_chart(fam.zeta0);
        auto orb = orbit_of(phi, fam.zeta0, poly ? n : 2 * m);
        Rational K = max_radius(orb) + 1;
        TMap g = tmul(phi, far_pair(K));
        fam.maps = {g};
        fam.parameters = {{"N", str(N)}, {"k", str(static_cast<long long>(k))}, {"K", str(K)},
                          {"alpha0", str(N / twok)}, {"e", exponent_lcm(g).get_str()}};
        auto& cs = fam.checks;
        expect(cs, "zeta_k = chi_N", chi(N).to_string(), orb[k].to_string());
        std::vector<TypeIIPoint> seg(orb.begin(), orb.begin() + n);
        std::string why = compare_on(phi, g, seg);
        expect(cs, "g agrees with phi on zeta_0..zeta_{n-1}", "", why);
        const Rational dn = rpow(3, n);
        if (poly) {
            expect(cs, "d_0(G)/d^n = 2^k(1/3^{k+1} + 1/3^n)", str(Rational(twok) * (1 / rpow(3, k + 1) + 1 / dn)),
                   str(prop_depth_dir(g, fam.zeta0, n, Direction::res(0))));
            expect_preimage_depth(cs, "2^k-th roots of unity: d_z(G)/d^n = (1/3^{k+1} - 1/3^n)/2", g, fam.zeta0, n,
                                  static_cast<int>(k), PPoint::at(1), (1 / rpow(3, k + 1) - 1 / dn) / 2, twok);
        } else {
            expect(cs, "d_inf(G)/d^n = a_k", str(a_k(k)), str(prop_depth_dir(g, fam.zeta0, n, Direction::outward())));
            expect(cs, "d_0(G)/d^n = 1 - a_{k+2}", str(1 - a_k(k + 2)),
                   str(prop_depth_dir(g, fam.zeta0, n, Direction::res(0))));
            Rational sum = 0;
            for (long j = 1; j <= m - k / 2 - 1; ++j) sum += rpow(two3, j) * rpow(third, j - 1);
            expect_preimage_depth(cs, "2^k-th roots of unity: d_z(G)/d^n", g, fam.zeta0, n, static_cast<int>(k),
                                  PPoint::at(1), sum / rpow(3, k + 2), twok);
        }
        return fam;
    };
    c.families.push_back(escalate(2, attempt_g));
    // ---- psi family
    long kt = -1;
    for (long kk = 1; kk < n && kt < 0; ++kk) {
        if (poly) {
            if (rpow(two3, kk + 1) <= mum && mum < mup && mup < rpow(two3, kk)) kt = kk;
        } else if (kk % 2 == 0) {
            Rational lo = 0, hi = 0;
            for (long j = 0; j <= kk / 2 - 1; ++j) lo += rpow(R(4, 9), j);
            hi = lo + rpow(R(4, 9), kk / 2);
            lo *= third;
            hi *= third;
            bool ok = (n % 2 == 0) ? (lo < mum && mum < mup && mup <= hi) : (lo <= mum && mum < mup && mup < hi);
            if (ok) kt = kk;
        }
    }
    if (kt < 0) throw SelectionInfeasible("no admissible k~ for the cubic psi-family");
    const long twokt = 1L << kt;
    auto attempt_psi = [&](const Rational& S) {
        FamilySpec fam;
        fam.label = "psi";
        fam.kind = s.tag.kind;
        fam.claims_stable = true;
        TPoly ts = TPoly::t(S);
        TMap bump{TPolyH({-TPoly(1), ts}), TPolyH({-(TPoly(1) + TPoly::t(1)), ts})};
        TMap psi = tmul(fh, bump);
        fam.zeta0 = chi(S / twokt);
        fam.conjugator = affine_chart(fam.zeta0);
        fam.maps = {psi};
        fam.parameters = {{"S", str(S)}, {"k~", str(static_cast<long long>(kt))}, {"alpha0", str(S / twokt)},
                          {"e", exponent_lcm(psi).get_str()}};
        auto& cs = fam.checks;
        auto orb = orbit_of(psi, fam.zeta0, n);
        expect(cs, "zeta_k~ = chi_S", chi(S).to_string(), orb[kt].to_string());
        for (int j = 0; j < n; ++j) {
            TangentData td = image_and_tangent(psi, orb[j]);
            expect(cs, "tangent at zeta_" + std::to_string(j) + " is the induced monomial",
                   map_to_string(canonical(poly ? Map{Poly::monomial(2, 0), Poly::monomial(0, 2)}
                                                : Map{Poly::monomial(0, 2), Poly::monomial(2, 0)})),
                   map_to_string(td.tangent));
        }
        const Rational dn = rpow(3, n);
        Rational dinf = 0, d0 = 0;
        if (poly) {
            dinf = 1 - rpow(two3, kt);
            d0 = rpow(two3, kt + 1);
        } else {
            for (long j = 0; j <= kt / 2 - 1; ++j) dinf += rpow(R(4, 9), j);
            dinf *= third;
            d0 = 1 - third * rpow(two3, kt) - dinf;
        }
        expect(cs, "d_inf(F)/d^n", str(dinf), str(prop_depth_dir(psi, fam.zeta0, n, Direction::outward())));
        expect(cs, "d_0(F)/d^n", str(d0), str(prop_depth_dir(psi, fam.zeta0, n, Direction::res(0))));
        expect_preimage_depth(cs, "2^k~-th roots of unity: d_z(F)/d^n = 1/3^{k~+1}", psi, fam.zeta0, n,
                              static_cast<int>(kt), PPoint::at(1), 1 / rpow(3, kt + 1), twokt);
        (void)dn;
        return fam;
    };
    c.families.push_back(escalate(2, attempt_psi));
    return c;
}

}  // namespace

Certificate build_case4(const Map& f, int n, const std::vector<GaussRat>& lambdas) {
    if (!is_n_unstable(canonical(f), n)) throw NotApplicable("build_case4: not n-unstable");
    CaseTag tag0 = classify_case(canonical(f), n);
    if (tag0.kind != CaseKind::Case4 || !tag0.normalizer) throw NotApplicable("build_case4: not in Case 4");
    Setup s = make_setup(f, n, *tag0.normalizer);
    if (s.d == 3) return cubic_families(s, n, true);
    Certificate c = skeleton(s, n);
    const long d = s.d;
    const TMap fh = lift(s.D.induced);
    const Rational mu = R(d - 1, d), th = R(d - 3, d);
    const Rational mum = mu_minus(static_cast<Depth>(dpow(d, n).get_num().get_si())), mup = 1 - mum;
    auto A = [&](long k) -> Rational { return R(2, 3) * rpow(mu, k) + R(1, 3) * rpow(mu, k) * rpow(th, n - k); };
    long k = -1;
    for (long kk = n - 2; kk >= 0 && k < 0; --kk)
        if (A(kk + 1) <= mum && mum <= mup && mup < A(kk)) k = kk;
    if (k < 0) throw SelectionInfeasible("build_case4: no k in [0, n-2] satisfies the double inequality");
    const long pk = dpow(d - 1, k).get_num().get_si();
    std::vector<GaussRat> lams = usable_lambdas(lambdas);
    auto attempt = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = CaseKind::Case4;
        fam.claims_stable = true;
        fam.lambdas = lams;
        fam.zeta0 = chi(N / pk);
        fam.conjugator = affine_chart(fam.zeta0);
        auto& cs = fam.checks;
        Rational K = 0;
        std::vector<TMap> phis;
        for (const auto& lam : lams) {
            TMap phi = tmul(tmul(fh, inv_linear(1, N)), inv_linear(lam, N));
            auto orb = orbit_of(phi, fam.zeta0, n);
            K = std::max(K, Rational(max_radius(orb) + 1));
            phis.push_back(phi);
        }
        for (std::size_t i = 0; i < lams.size(); ++i) fam.maps.push_back(tmul(phis[i], far_pair(K)));
        fam.parameters = {{"N", str(N)}, {"k", str(static_cast<long long>(k))}, {"alpha0", str(N / pk)},
                          {"K", str(K)}, {"mu", str(mu)}, {"theta", str(th)}, {"e", exponent_lcm(fam.maps[0]).get_str()}};
        const Rational dn = dpow(d, n);
        for (std::size_t i = 0; i < lams.size(); ++i) {
            const TMap& g = fam.maps[i];
            const std::string at = " (lambda=" + lams[i].to_string() + ")";
            auto orb = orbit_of(g, fam.zeta0, n);
            expect(cs, "zeta_k = chi_N" + at, chi(N).to_string(), orb[k].to_string());
            std::vector<TypeIIPoint> seg(orb.begin(), orb.begin() + n);
            expect(cs, "g agrees with phi on zeta_0..zeta_{n-1}" + at, "", compare_on(phis[i], g, seg));
            for (int j = 0; j < n; ++j) {
                TangentData td = image_and_tangent(g, orb[j]);
                const Rational alpha = -orb[j].alpha();
                expect(cs, "surplus toward the Gauss point at zeta_" + std::to_string(j) + at, alpha <= N ? "0" : "2",
                       std::to_string(surplus(td, Direction::res(0))));
                expect(cs, "surplus toward infinity at zeta_" + std::to_string(j) + at, "1",
                       std::to_string(surplus(td, Direction::outward())));
            }
            SurplusIterate w0 = surplus_iterate(g, fam.zeta0, Direction::res(0), n);
            SurplusIterate winf = surplus_iterate(g, fam.zeta0, Direction::outward(), n);
            expect(cs, "sbar^n(w0) = (2/3)mu^{k+1}(1 - theta^{n-k-1})" + at,
                   str(R(2, 3) * rpow(mu, k + 1) * (1 - rpow(th, n - k - 1))), str(w0.prop));
            expect(cs, "sbar^n(winf) = 1 - (2/3)mu^k - (1/3)mu^k theta^{n-k}" + at, str(1 - A(k)), str(winf.prop));
            expect(cs, "d_0(G)/d^n = (2/3)mu^{k+1} + (1/3)mu^{k+1}theta^{n-k-1}" + at, str(A(k + 1)),
                   str(prop_depth_dir(g, fam.zeta0, n, Direction::res(0))));
            expect(cs, "d_inf(G)/d^n = sbar^n(winf)" + at, str(1 - A(k)),
                   str(prop_depth_dir(g, fam.zeta0, n, Direction::outward())));
            const Rational roots = (1 - rpow(th, n - k - 1)) / (3 * dpow(d, k + 1));
            expect_preimage_depth(cs, "(d-1)^k-th roots of 1" + at, g, fam.zeta0, n, static_cast<int>(k), PPoint::at(1),
                                  roots, pk);
            expect_preimage_depth(cs, "(d-1)^k-th roots of the lambda pole" + at, g, fam.zeta0, n, static_cast<int>(k),
                                  PPoint::at(lams[i].inverse()), roots, pk);
            (void)dn;
        }
        return fam;
    };
    c.families.push_back(escalate(2, attempt));
    return c;
}

// ---------------------------------------------------------------- Case 5

Certificate build_case5(const Map& f, int n, const std::vector<GaussRat>& lambdas) {
    if (!is_n_unstable(canonical(f), n)) throw NotApplicable("build_case5: not n-unstable");
    CaseTag tag0 = classify_case(canonical(f), n);
    if (tag0.kind != CaseKind::Case5 || !tag0.normalizer) throw NotApplicable("build_case5: not in Case 5");
    if (n < 3) throw NotApplicable("build_case5: requires n >= 3");
    Setup s = make_setup(f, n, *tag0.normalizer);
    if (s.d == 3) return cubic_families(s, n, false);
    Certificate c = skeleton(s, n);
    const long d = s.d;
    const TMap fh = lift(s.D.induced);
    const Rational mu = R(d - 1, d), th = R(d - 3, d);
    const Rational mum = mu_minus(static_cast<Depth>(dpow(d, n).get_num().get_si())), mup = 1 - mum;
    const long m = (n + 1) / 2;
    auto a_k = [&](long k) -> Rational {
        Rational s1 = 0, s2 = 0;
        for (long j = 0; j <= k / 2; ++j) s1 += rpow(mu, 2 * j);
        for (long j = 1; j <= m - k / 2 - 1; ++j) s2 += rpow(mu, j) * rpow(th, j);
        return s1 / d + rpow(mu, k) * s2 / d;
    };
    long k = -1;
    for (long kk = 0; kk + 2 <= 2 * m - 2 && k < 0; kk += 2) {
        bool ok = (n % 2 == 0) ? (a_k(kk) < mum && mup <= a_k(kk + 2)) : (a_k(kk) <= mum && mup < a_k(kk + 2));
        if (ok) k = kk;
    }
    if (k < 0) throw SelectionInfeasible("build_case5: no even k satisfies the a_k double inequality");
    const long pk = dpow(d - 1, k).get_num().get_si();
    std::vector<GaussRat> lams = usable_lambdas(lambdas);
    auto attempt = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = CaseKind::Case5;
        fam.claims_stable = true;
        fam.lambdas = lams;
        fam.zeta0 = chi(N / pk);
        fam.conjugator = affine_chart(fam.zeta0);
        auto& cs = fam.checks;
        Rational K = 0;
        std::vector<TMap> phis;
        for (const auto& lam : lams) {
            TMap phi = tmul(tmul(fh, linear(1, N)), linear(lam, N));
            K = std::max(K, Rational(max_radius(orbit_of(phi, fam.zeta0, 2 * m)) + 1));
            phis.push_back(phi);
        }
        for (std::size_t i = 0; i < lams.size(); ++i) fam.maps.push_back(tmul(phis[i], far_pair(K)));
        fam.parameters = {{"N", str(N)}, {"k", str(static_cast<long long>(k))}, {"alpha0", str(N / pk)},
                          {"K", str(K)}, {"m", str(static_cast<long long>(m))}, {"e", exponent_lcm(fam.maps[0]).get_str()}};
        Rational rsum = 0;
        for (long j = 1; j <= m - k / 2 - 1; ++j) rsum += rpow(mu, j) * rpow(th, j - 1);
        const Rational roots = rsum / (d * dpow(d, k + 1));
        for (std::size_t i = 0; i < lams.size(); ++i) {
            const TMap& g = fam.maps[i];
            const std::string at = " (lambda=" + lams[i].to_string() + ")";
            auto orb = orbit_of(g, fam.zeta0, n);
            expect(cs, "zeta_k = chi_N" + at, chi(N).to_string(), orb[k].to_string());
            std::vector<TypeIIPoint> seg(orb.begin(), orb.begin() + n);
            expect(cs, "g agrees with phi on zeta_0..zeta_{n-1}" + at, "", compare_on(phis[i], g, seg));
            expect(cs, "d_inf(G)/d^n = a_k" + at, str(a_k(k)), str(prop_depth_dir(g, fam.zeta0, n, Direction::outward())));
            expect(cs, "d_0(G)/d^n = 1 - a_{k+2}" + at, str(1 - a_k(k + 2)),
                   str(prop_depth_dir(g, fam.zeta0, n, Direction::res(0))));
            // At chi_N the poles of phi sit at residues 1 and 1/lambda.
            expect_preimage_depth(cs, "(d-1)^k-th roots of 1" + at, g, fam.zeta0, n, static_cast<int>(k), PPoint::at(1),
                                  roots, pk);
            expect_preimage_depth(cs, "(d-1)^k-th roots of the lambda zero" + at, g, fam.zeta0, n, static_cast<int>(k),
                                  PPoint::at(lams[i].inverse()), roots, pk);
        }
        return fam;
    };
    c.families.push_back(escalate(2, attempt));
    return c;
}

// ---------------------------------------------------------------- constant induced map

namespace {

/// The normal forms F = X^{(d+1)/2}Y^{(d-1)/2}[1:0] and G = X^{(d-3)/2}Y^{(d-1)/2}[X^2:Y^2].
Map normal_F(int d) {
    Poly H = Poly::monomial((d + 1) / 2, (d - 1) / 2);
    return canonical(Map{H, Poly::zero(d)});
}
Map normal_G(int d) {
    Poly H = Poly::monomial((d - 3) / 2, (d - 1) / 2);
    return canonical(Map{H * Poly::monomial(2, 0), H * Poly::monomial(0, 2)});
}

/// Möbius M with M(0) = a and M(infinity) = b.
Map mobius_0inf_to(const PPoint& a, const PPoint& b) {
    if (a.inf) return mobius(b.z, 1, 1, 0);
    if (b.inf) return mobius(1, a.z, 0, 1);
    return mobius(b.z, a.z, 1, 1);
}

/// M_t(z) = t^s z^e as a degree-1 TMap (e = +-1).
TMap scaling_chart(const Rational& s, int e) {
    if (e == 1) return {TPolyH({TPoly(), TPoly::t(s)}), TPolyH({TPoly(1), TPoly()})};
    return {TPolyH({TPoly::t(s), TPoly()}), TPolyH({TPoly(), TPoly(1)})};
}

}  // namespace

Certificate build_constant(const Map& f0, int n, const std::vector<GaussRat>& lambdas) {
    const Map f = canonical(f0);
    Decomposition D = decompose(f);
    if (D.induced_degree() != 0) throw NotApplicable("build_constant: induced map is not constant");
    if (!is_semistable(f)) throw NotApplicable("build_constant: not semistable");
    const int d = f.degree();
    const PPoint c0 = PPoint::from_xy(D.induced.p.c[0], D.induced.q.c[0]);
    const bool in_Id = is_in_Id(D);
    if (!in_Id && !is_n_unstable(f, n)) throw NotApplicable("build_constant: f is neither in I(d) nor n-unstable");
    if (in_Id && is_stable(f)) {
        // Stable I(d): holes normalized so that the constant value is 0 and infinity is a hole.
        std::optional<PPoint> other;
        for (const auto& h : D.holes)
            if (h.split && h.point != c0 && (!other || h.point.inf)) other = h.point;
        if (!other) throw OrbitNotSplit("build_constant: no split hole besides the constant value");
        Map N = mobius_0inf_to(c0, *other);
        Certificate c;
        c.input = f;
        c.n = n;
        c.kind = CaseKind::ConstantInduced;
        c.normalizer = N;
        c.base = conjugate(f, N);
        Decomposition B = decompose(c.base);
        const Poly& H = B.h;
        const TMap tH{lift(H).scaled(TPoly::t(1)), lift(H)};
        Poly HY = exact_div(H, Poly::monomial(0, 1));
        const TMap hH{lift(HY * Poly::monomial(1, 0)).scaled(TPoly::t(1)), lift(HY * Poly::monomial(0, 1))};
        // Closed forms.
        Depth dn1 = 1;
        for (int i = 0; i < n - 1; ++i) dn1 *= d;
        const Depth d0 = point_order(H, PPoint::at(0)), dinf = point_order(H, PPoint::infinity());
        Map gn = canonical(Map{Poly::zero(static_cast<int>(dn1 * d)), H.pow(static_cast<unsigned>(dn1))});
        const Depth a = d0 * (dn1 * d - 1) / (d - 1);
        const Depth b = dn1 * dinf - (dn1 - 1) / (d - 1) * d0;
        Poly core = exact_div(H, Poly::monomial(static_cast<int>(d0), static_cast<int>(dinf)));
        Poly hpoly = core.pow(static_cast<unsigned>(dn1)) * Poly::monomial(static_cast<int>(a), static_cast<int>(b));
        Map hn = canonical(Map{Poly::zero(hpoly.degree()), hpoly});
        FamilySpec g;
        g.label = "g";
        g.kind = CaseKind::ConstantInduced;
        g.degenerate = true;
        g.claims_stable = true;
        g.maps = {tH};
        g.conjugator = identity_tmap();
        g.closed_form_limit = gn;
        g.parameters = {{"H", poly_to_string(H)}, {"d0", str(d0)}, {"dinf", str(dinf)}};
        const Map g17 = canonical(Map{H.scaled(GaussRat(R(1, 7))), H});
        expect_true(g.checks, "g_{1/7} outside I(d)", !is_in_Id(g17));
        expect_true(g.checks, "g_{1/7} is stable", is_stable(g17));
        FamilySpec h;
        h.label = "h";
        h.kind = CaseKind::ConstantInduced;
        h.degenerate = true;
        h.claims_stable = true;
        h.maps = {hH};
        h.conjugator = identity_tmap();
        h.closed_form_limit = hn;
        h.parameters = {{"H/Y", poly_to_string(HY)}, {"d0(h_n)", str(a)}};
        expect(h.checks, "d_0(h_n) = d_0 (d^n - 1)/(d - 1)", str(a), str(point_order(hpoly, PPoint::at(0))));
        Map h17 = canonical(Map{HY * Poly::monomial(1, 0).scaled(GaussRat(R(1, 7))), HY * Poly::monomial(0, 1)});
        expect_true(h.checks, "h_{1/7} is stable", is_stable(h17));
        expect_true(h.checks, "h_{1/7} outside I(d)", !is_in_Id(h17));
        c.families = {g, h};
        return c;
    }
    // Strictly semistable I(d) or n-unstable: rewrite to G and delegate.
    if (d % 2 == 0) throw NotApplicable("build_constant: even degree has no strictly semistable constant normal form");
    std::optional<PPoint> deep;
    for (const auto& h : D.holes)
        if (h.split && h.depth == (d + 1) / 2 && h.point != c0) deep = h.point;
    Map N;
    TMap M;
    std::string note;
    if (deep) {
        // X^{(d+1)/2} H [1:0]: deep hole at 0, constant value at infinity; M_t(z) = tz.
        N = mobius_0inf_to(*deep, c0);
        M = scaling_chart(1, 1);
        note = "f_{-1} -> F";
    } else if (point_order(D.h, c0) == (d - 1) / 2) {
        std::optional<PPoint> other;
        for (long k = 1; k < 64 && !other; ++k)
            for (long sgn : {k, -k}) {
                PPoint z = PPoint::at(GaussRat(sgn));
                if (z != c0) {
                    other = z;
                    break;
                }
            }
        N = mobius_0inf_to(c0, *other);
        M = scaling_chart(1, -1);
        note = "f_1 -> F";
    } else {
        throw NotApplicable("build_constant: no normal form applies");
    }
    const Map fi = conjugate(f, N);
    const Map F = normal_F(d), G = normal_G(d);
    Certificate inner = make_certificate(G, n, lambdas);
    Certificate c = inner;
    c.input = f;
    c.kind = CaseKind::ConstantInduced;
    c.normalizer = N;
    // inner.base is G conjugated by inner.normalizer; chain f_i -> F <- G -> base.
    c.identifications.insert(c.identifications.begin(),
                             {{note, fi, M, F}, {"G -> F", G, scaling_chart(-1, 1), F}});
    if (inner.normalizer != identity_map())
        c.identifications.push_back({"G -> normalized G", G, lift(inner.normalizer), c.base});
    return c;
}


// ---------------------------------------------------------------- Cases 0-3: shared data

namespace {

/// Orbit h_j of the bad hole with depths d_j, multiplicities m_j and cumulative multiplicities.
struct HoleOrbit {
    std::vector<PPoint> h;
    std::vector<Depth> dep;
    std::vector<long> mult;
    std::vector<Rational> cum;  // m_h(f̂^j)
    int ell = 0;                // min(period, n)
    bool fixed_n = false;       // f̂^n(h_0) = h_0
};

HoleOrbit hole_orbit(const Setup& s, int n) {
    HoleOrbit o;
    const int L = 2 * n + 2;
    o.h = point_orbit(s.D.induced, s.tag.bad_hole, L + 1);
    Rational c = 1;
    for (int j = 0; j <= L; ++j) {
        o.dep.push_back(depth(s.base, o.h[j]));
        o.mult.push_back(local_multiplicity(s.D.induced, o.h[j]));
        o.cum.push_back(c);
        c *= o.mult.back();
    }
    o.ell = n;
    for (int p = 1; p < n; ++p)
        if (o.h[p] == o.h[0]) {
            o.ell = p;
            break;
        }
    o.fixed_n = o.h[n] == o.h[0];
    return o;
}

/// Sorted "direction:surplus" list of the positive surplus directions other than Out.
std::string surplus_profile(const TangentData& td) {
    std::vector<std::string> parts;
    for (const auto& [v, s] : surplus_directions(td))
        if (!v.out && s > 0) parts.push_back(v.to_string() + ":" + std::to_string(s));
    std::sort(parts.begin(), parts.end());
    std::string r;
    for (const auto& p : parts) r += (r.empty() ? "" : ",") + p;
    return r;
}

std::string expected_profile(std::vector<std::pair<GaussRat, int>> items) {
    std::vector<std::string> parts;
    for (const auto& [c, s] : items) parts.push_back(Direction::res(c).to_string() + ":" + std::to_string(s));
    std::sort(parts.begin(), parts.end());
    std::string r;
    for (const auto& p : parts) r += (r.empty() ? "" : ",") + p;
    return r;
}

/// Integers -1, -2, ... avoiding the given values.
/// -start, -start-1, ... skipping avoided values.
std::vector<GaussRat> negative_choices(std::size_t count, const std::vector<GaussRat>& avoid, long start = 1) {
    std::vector<GaussRat> out;
    for (long k = start; out.size() < count; ++k) {
        GaussRat c(-k);
        if (std::find(avoid.begin(), avoid.end(), c) == avoid.end()) out.push_back(c);
    }
    return out;
}

TPoly point_series(const PPoint& h) { return TPoly(h.z); }

/// h + c t^e.
TPoly offset(const PPoint& h, const GaussRat& c, const Rational& e) { return TPoly(h.z) + TPoly::monomial(c, e); }

Rational max_alpha(const std::vector<TypeIIPoint>& pts) {
    Rational m = 0;
    for (const auto& p : pts) m = std::max(m, p.alpha());
    return m;
}

Rational ceil_rat(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(r);
}

void param(FamilySpec& fam, const std::string& k, const std::string& v) { fam.parameters.push_back({k, v}); }

}  // namespace

// ---------------------------------------------------------------- Case 1

namespace {

Certificate case1_impl(const Map& f0, int n, const std::vector<GaussRat>& lambdas, int variant) {
    const Map f = canonical(f0);
    if (!is_n_unstable(f, n) || classify_case(f, n).kind != CaseKind::Case1)
        throw NotApplicable("build_case1: not in Case 1");
    Setup s = make_setup(f, n, normalizer_finite_orbit(f, n));
    Certificate c = skeleton(s, n);
    const int d = s.d;
    const HoleOrbit o = hole_orbit(s, n);
    const int qell = static_cast<int>(s.tag.orbit.size());
    const Depth d0 = o.dep[0];
    const TMap fh = lift(s.D.induced);
    const PPoint h0 = o.h[0];
    std::vector<GaussRat> lams = usable_lambdas(lambdas);
    std::vector<GaussRat> avoid = lams;
    avoid.push_back(GaussRat(0));
    avoid.push_back(GaussRat(1));
    const std::vector<GaussRat> cs = negative_choices(d0 >= 2 ? static_cast<std::size_t>(d0 - 2) : 0, avoid, 1 + variant);
    const TypeIIPoint z0(point_series(h0), 1);
    const auto forb = orbit_of(fh, z0, n);
    const Rational mum = mu_minus(static_cast<Depth>(dpow(d, n).get_num().get_si()));
    auto attempt = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = CaseKind::Case1;
        fam.lambdas = lams;
        fam.zeta0 = z0;
        fam.conjugator = affine_chart(z0);
        param(fam, "N", str(N));
        param(fam, "q+l", str(static_cast<long long>(qell)));
        std::string cl;
        for (const auto& x : cs) cl += (cl.empty() ? "" : ",") + x.to_string();
        param(fam, "c", cl);
        auto& ch = fam.checks;
        Depth sum = 0;
        for (int j = 0; j < qell; ++j) sum += o.dep[j];
        expect_true(ch, "sum of orbit depths >= 3", sum >= 3, str(static_cast<long long>(sum)));
        expect_true(ch, "deg f^ >= 2 and d >= 5", s.D.induced_degree() >= 2 && d >= 5);
        TMap common = tmul(fh, other_holes(s.D, {h0}, N));
        for (const auto& ci : cs) common = tmul(common, bump_at(offset(h0, ci, 1), N));
        std::vector<TypeIIPoint> seg(forb.begin(), forb.begin() + n);
        const auto verts = hull_vertices(seg);
        const Rational dn = dpow(d, n);
        for (const auto& lam : lams) {
            TMap g = tmul(tmul(common, bump_at(offset(h0, 1, 1), N)), bump_at(offset(h0, lam, 1), N));
            fam.maps.push_back(g);
            const std::string at = " (lambda=" + lam.to_string() + ")";
            expect(ch, "agrees with f^ on the hull of zeta_0..zeta_{n-1}" + at, "", compare_on(fh, g, verts));
            TangentData td = image_and_tangent(g, z0);
            std::vector<std::pair<GaussRat, int>> exp{{GaussRat(1), 1}, {lam, 1}};
            for (const auto& ci : cs) exp.push_back({ci, 1});
            expect(ch, "surplus directions at zeta_0" + at, expected_profile(exp), surplus_profile(td));
            auto orb = orbit_of(g, z0, n);
            for (int j = 1; j < n; ++j) {
                TangentData tj = image_and_tangent(g, orb[j]);
                expect(ch, "s(v_" + std::to_string(j) + ") = d_" + std::to_string(j) + at, str(static_cast<long long>(o.dep[j])),
                       std::to_string(surplus(tj, direction_of(orb[j], point_series(o.h[j])))));
            }
            std::vector<GaussRat> bumps{GaussRat(1), lam};
            bumps.insert(bumps.end(), cs.begin(), cs.end());
            for (const auto& b : bumps)
                expect(ch, "sbar^n(w_" + b.to_string() + ") = 1/d" + at, str(R(1, d)),
                       str(surplus_iterate(g, z0, Direction::res(b), n).prop));
            SurplusIterate w0 = surplus_iterate(g, z0, Direction::res(0), n);
            expect_true(ch, "sbar^n(w_0) <= mu-(d^n)" + at, w0.prop <= mum, str(w0.prop));
            bool some = false;
            for (int j = 1; j < qell; ++j) some = some || o.dep[j] >= 1;
            if (some) expect_true(ch, "sbar^n(w_0) > 0" + at, w0.prop > 0, str(w0.prop));
            SurplusIterate wi = surplus_iterate(g, z0, Direction::outward(), n);
            Rational ms = Rational(static_cast<long>(wi.mult + wi.surplus)) / dn;
            expect_true(ch, "mbar^n(w_inf) + sbar^n(w_inf) < mu-(d^n)" + at, ms < mum, str(ms));
        }
        param(fam, "e", exponent_lcm(fam.maps[0]).get_str());
        return fam;
    };
    c.families.push_back(escalate(ceil_rat(max_alpha(forb)) + 1, attempt));
    return c;
}

}  // namespace

Certificate build_case1(const Map& f, int n, const std::vector<GaussRat>& lambdas) { return case1_impl(f, n, lambdas, 0); }

// ---------------------------------------------------------------- Cases 0 and 2

namespace {
Certificate periodic_impl(const Map& f, int n, const std::vector<GaussRat>& lambdas, int variant);
}

namespace {

Certificate case02_impl(const Map& f0, int n, const std::vector<GaussRat>& lambdas, int variant) {
    const Map f = canonical(f0);
    if (!is_n_unstable(f, n)) throw NotApplicable("build_case02: not n-unstable");
    const CaseKind kind = classify_case(f, n).kind;
    if (kind != CaseKind::Case0 && kind != CaseKind::Case2) throw NotApplicable("build_case02: not in Case 0 or 2");
    Setup s = make_setup(f, n, normalizer_finite_orbit(f, n));
    Certificate c = skeleton(s, n);
    const long d = s.d;
    const HoleOrbit o = hole_orbit(s, n);
    const int ell = o.ell;
    const Rational mum = mu_minus(static_cast<Depth>(dpow(d, n).get_num().get_si())), mup = 1 - mum;
    // mu_i = sum_{j<i} (d_j/d) * m_h(f̂^j)/d^j
    std::vector<Rational> mus{Rational(0)};
    for (int j = 0; j < n; ++j) mus.push_back(mus.back() + Rational(static_cast<long>(o.dep[j])) / d * o.cum[j] / dpow(d, j));
    int kstar = 0;
    for (int k = n - 1; k >= 1 && kstar == 0; --k)
        if (o.fixed_n ? mus[k] < mup : mus[k] <= mup) kstar = k;
    // With k* = 0 a fixed cycle of length n leaves too few holes for moduli; use the periodic construction.
    if (kstar == 0 && o.fixed_n && ell == n && kind == CaseKind::Case0) return periodic_impl(f, n, lambdas, variant);
    const int qs = kstar / ell, rs = kstar % ell;
    const Rational S = mus[kstar], mbar = o.cum[kstar] / dpow(d, kstar);
    long dplus = -1;
    for (long x = o.dep[rs]; x >= (rs == 0 ? 2 : 0) && dplus < 0; --x) {
        Rational lo = S + Rational(x - 2) / d * mbar, hi = S + Rational(x) / d * mbar;
        bool ok = o.fixed_n ? (lo < mum && mup <= hi) : (lo <= mum && mup < hi);
        if (ok) dplus = x;
    }
    if (dplus < 0) throw SelectionInfeasible("build_case02: no admissible d+ for k* = " + std::to_string(kstar));
    const long dminus = static_cast<long>(o.dep[rs]) - dplus;
    const Rational Delta = S + Rational(dplus) / d * mbar;
    const Rational mq = o.cum[qs * ell] / dpow(d, qs * ell);
    const PPoint h0 = o.h[0];
    const TMap fh = lift(s.D.induced);
    const TypeIIPoint z0(point_series(h0), 2);
    const int nprime = std::max((qs + 1) * ell - 1, n);
    const auto forb = orbit_of(fh, z0, nprime);
    std::vector<PPoint> skip(o.h.begin(), o.h.begin() + ell);
    std::vector<Rational> mur;
    for (int r = 0; r < ell; ++r) mur.push_back(o.cum[qs * ell + r]);
    std::vector<GaussRat> lams = usable_lambdas(lambdas);
    const Rational dn = dpow(d, n);
    auto attempt = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = s.tag.kind;
        fam.lambdas = lams;
        fam.zeta0 = z0;
        fam.conjugator = affine_chart(z0);
        param(fam, "N", str(N));
        param(fam, "ell", str(static_cast<long long>(ell)));
        param(fam, "k_star", str(static_cast<long long>(kstar)));
        param(fam, "q_star", str(static_cast<long long>(qs)));
        param(fam, "r_star", str(static_cast<long long>(rs)));
        param(fam, "d_plus", str(static_cast<long long>(dplus)));
        param(fam, "d_minus", str(static_cast<long long>(dminus)));
        param(fam, "Delta", str(Delta));
        auto& ch = fam.checks;
        // Selection inequalities, re-verified.
        if (kstar >= 1) expect_true(ch, o.fixed_n ? "mu_{k*} < mu+(d^n)" : "mu_{k*} <= mu+(d^n)", o.fixed_n ? S < mup : S <= mup, str(S));
        if (kstar + 1 < n)
            expect_true(ch, "k* is maximal", o.fixed_n ? mus[kstar + 1] >= mup : mus[kstar + 1] > mup, str(mus[kstar + 1]));
        auto gam = [&](int r, int sign) { return bump_at(offset(o.h[r], 1, 2 * mur[r] + sign), N); };
        TMap common = tmul(fh, other_holes(s.D, skip, N));
        if (rs == 0) {
            common = tmul(common, tpow(gam(0, +1), static_cast<int>(dplus - 2)));
            common = tmul(common, tpow(gam(0, -1), static_cast<int>(dminus)));
            for (int r = 1; r < ell; ++r) common = tmul(common, tpow(gam(r, -1), static_cast<int>(o.dep[r])));
        } else {
            common = tmul(common, tpow(gam(0, +1), static_cast<int>(o.dep[0] - 2)));
            common = tmul(common, tpow(gam(rs, +1), static_cast<int>(dplus)));
            common = tmul(common, tpow(gam(rs, -1), static_cast<int>(dminus)));
            for (int r = 1; r < rs; ++r) common = tmul(common, tpow(gam(r, +1), static_cast<int>(o.dep[r])));
            for (int r = rs + 1; r < ell; ++r) common = tmul(common, tpow(gam(r, -1), static_cast<int>(o.dep[r])));
        }
        const auto verts = hull_vertices(forb);
        const TypeIIPoint zq = forb[qs * ell];
        for (const auto& lam : lams) {
            const std::string at = " (lambda=" + lam.to_string() + ")";
            TMap g = tmul(tmul(common, bump_at(offset(h0, lam, 2 * mur[0]), N)), bump_at(offset(h0, 1, 2 * mur[0]), N));
            fam.maps.push_back(g);
            expect(ch, "agrees with f^ on the hull of zeta_0..zeta_n'" + at, "", compare_on(fh, g, verts));
            TangentData tq = image_and_tangent(g, zq);
            for (const auto& w : {GaussRat(1), lam})
                expect(ch, "s(w_" + w.to_string() + ") = 1 at zeta_{l q*}" + at, "1",
                       std::to_string(surplus(tq, direction_of(zq, offset(h0, w, 2 * mur[0])))));
            for (int r = 0; r < ell; ++r)
                for (int sign : {+1, -1}) {
                    long want = 0;
                    if (rs == 0) {
                        if (r == 0) want = sign > 0 ? dplus - 2 : dminus;
                        else want = sign < 0 ? static_cast<long>(o.dep[r]) : 0;
                    } else if (r == 0) want = sign > 0 ? static_cast<long>(o.dep[0]) - 2 : 0;
                    else if (r < rs) want = sign > 0 ? static_cast<long>(o.dep[r]) : 0;
                    else if (r == rs) want = sign > 0 ? dplus : dminus;
                    else want = sign < 0 ? static_cast<long>(o.dep[r]) : 0;
                    TypeIIPoint xi(point_series(o.h[r]), 2 * mur[r] + sign);
                    expect(ch, "s(u_" + std::to_string(r) + (sign > 0 ? "^+)" : "^-)") + at, std::to_string(want),
                           std::to_string(surplus(g, xi, direction_of(xi, offset(o.h[r], 1, 2 * mur[r] + sign)))));
                }
            expect(ch, "sbar^n(v_0) = Delta - (2/d) mbar_{q* l}" + at, str(Delta - Rational(2) / d * mq),
                   str(surplus_iterate(g, z0, Direction::res(0), n).prop));
            const long long cnt = o.cum[qs * ell].get_num().get_si();
            for (const auto& w : {GaussRat(1), lam})
                expect_preimage_depth(ch, "preimages of w_" + w.to_string() + " under T^{q* l}: dbar = 1/d^{q* l + 1}" + at, g,
                                      z0, n, qs * ell, PPoint::at(w), 1 / dpow(d, qs * ell + 1), cnt);
            // The local degree m_h(f̂^n) stays in the reduction when zeta_n = zeta_0.
            const Rational back = forb[n] == z0 ? o.cum[n] / dn : Rational(0);
            expect(ch, "dbar_inf(G) = 1 - Delta (- mbar^n if zeta_n = zeta_0)" + at, str(1 - Delta - back),
                   str(prop_depth_dir(g, z0, n, Direction::outward())));
        }
        param(fam, "e", exponent_lcm(fam.maps[0]).get_str());
        return fam;
    };
    Rational N0 = 2 * max_alpha(forb) + 2;
    c.families.push_back(escalate(ceil_rat(N0), attempt));
    return c;
}

// ---------------------------------------------------------------- Case 3

}  // namespace

Certificate build_case02(const Map& f, int n, const std::vector<GaussRat>& lambdas) { return case02_impl(f, n, lambdas, 0); }

namespace {

/// Critical points of a rational map of P^1 (finite ones and, if applicable, infinity).
std::vector<PPoint> critical_points(const Map& T, bool& all_rational) {
    UPoly p = dehomogenize(T.p), q = dehomogenize(T.q);
    UPoly W = p.derivative() * q - p * q.derivative();
    std::vector<PPoint> out;
    all_rational = true;
    int found = 0;
    for (const auto& r : gaussian_roots(W)) {
        out.push_back(PPoint::at(r));
        found += root_order(W, r);
    }
    const int deg = T.degree();
    const int at_inf = 2 * deg - 2 - std::max(W.degree(), 0);
    if (W.is_zero()) all_rational = false;
    if (at_inf > 0) out.push_back(PPoint::infinity());
    if (found + at_inf != 2 * deg - 2) all_rational = false;
    return out;
}

Certificate case3_generic(const Setup& s, int n, const std::vector<GaussRat>& lambdas, int variant) {
    Certificate c = skeleton(s, n);
    const long d = s.d;
    const HoleOrbit o = hole_orbit(s, n);
    const int ell = o.ell;
    const PPoint h0 = o.h[0];
    const TMap fh = lift(s.D.induced);
    const Rational mum = mu_minus(static_cast<Depth>(dpow(d, n).get_num().get_si()));
    // c_i^{(j)} choices.
    std::vector<GaussRat> lams = usable_lambdas(lambdas);
    std::vector<std::vector<GaussRat>> cc(ell);
    int j0 = -1;
    if (o.dep[0] == 2)
        for (int j = 1; j < ell && j0 < 0; ++j)
            if (o.dep[j] != 0) j0 = j;
    for (int j = 0; j < ell; ++j) {
        std::size_t need = static_cast<std::size_t>(j == 0 ? o.dep[0] - 1 : o.dep[j]);
        std::vector<GaussRat> fixed;
        if (j == 0) {
            fixed.push_back(GaussRat(1));
            if (o.dep[0] >= 3) fixed.push_back(GaussRat(0));
        }
        if (j == j0) fixed.push_back(GaussRat(0));
        std::vector<GaussRat> avoid = lams;
        avoid.insert(avoid.end(), fixed.begin(), fixed.end());
        avoid.push_back(GaussRat(1));
        avoid.push_back(GaussRat(0));
        auto rest = negative_choices(need > fixed.size() ? need - fixed.size() : 0, avoid, 1 + variant);
        cc[j] = fixed;
        cc[j].resize(std::min(fixed.size(), need));
        cc[j].insert(cc[j].end(), rest.begin(), rest.end());
    }
    const TypeIIPoint z0(point_series(h0), 1);
    auto attempt = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = CaseKind::Case3;
        fam.lambdas = lams;
        fam.zeta0 = z0;
        fam.conjugator = affine_chart(z0);
        param(fam, "N", str(N));
        param(fam, "ell", str(static_cast<long long>(ell)));
        param(fam, "branch", "generic");
        auto& ch = fam.checks;
        std::vector<PPoint> skip(o.h.begin(), o.h.begin() + ell);
        TMap common = tmul(fh, other_holes(s.D, skip, N));
        for (int j = 0; j < ell; ++j)
            for (const auto& cj : cc[j]) common = tmul(common, bump_at(offset(o.h[j], cj, 1), N));
        auto forb = orbit_of(fh, z0, ell);
        std::vector<TypeIIPoint> seg(forb.begin() + 1, forb.begin() + ell);
        const auto verts = hull_vertices(seg);
        const Rational dn = dpow(d, n);
        const Rational dfn = prop_depth_iterate(s.base, h0, n);
        for (const auto& lam : lams) {
            const std::string at = " (lambda=" + lam.to_string() + ")";
            TMap g = tmul(common, bump_at(offset(h0, lam, 1), N));
            fam.maps.push_back(g);
            expect(ch, "agrees with f^ on the hull of zeta_1..zeta_{l-1}" + at, "", compare_on(fh, g, verts));
            auto orb = orbit_of(g, z0, n);
            TangentData t0 = image_and_tangent(g, z0);
            for (const auto& w : {GaussRat(1), lam})
                expect(ch, "s(w_" + w.to_string() + ") = 1" + at, "1", std::to_string(surplus(t0, Direction::res(w))));
            bool le1 = true, hit = false;
            Direction v = Direction::res(0);
            for (int j = 0; j < n; ++j) {
                TangentData tj = image_and_tangent(g, orb[j]);
                const Direction gdir = direction_of(orb[j], TypeIIPoint::gauss());
                for (const auto& [u, sv] : surplus_directions(tj))
                    if (u != gdir && sv > 1) le1 = false;
                if (j < ell && surplus(tj, v) > 0) hit = true;
                v = tangent_image(tj, v);
            }
            expect_true(ch, "s <= 1 off the Gauss direction along the orbit" + at, le1);
            expect_true(ch, "some T^j(w_0), j < l, carries surplus" + at, hit);
            std::vector<GaussRat> ws{GaussRat(0), GaussRat(1), lam};
            for (const auto& cj : cc[0]) ws.push_back(cj);
            for (const auto& w : ws) {
                Rational p = surplus_iterate(g, z0, Direction::res(w), n).prop;
                expect_true(ch, "sbar^n(w_" + w.to_string() + ") < mu-(d^n)" + at, p < mum, str(p));
            }
            expect(ch, "sbar^n(w_inf) = 1 - 1/d^n - dbar_0(f^n)" + at, str(1 - 1 / dn - dfn),
                   str(surplus_iterate(g, z0, Direction::outward(), n).prop));
        }
        param(fam, "e", exponent_lcm(fam.maps[0]).get_str());
        return fam;
    };
    c.families.push_back(escalate(2, attempt));
    return c;
}

/// Q(i) values of small height for the beta search.
std::vector<GaussRat> small_height(int count) {
    std::vector<GaussRat> out;
    for (long den = 2; static_cast<int>(out.size()) < count; ++den)
        for (long num = 1; num < den && static_cast<int>(out.size()) < count; ++num) {
            if (std::gcd(num, den) != 1) continue;
            for (const GaussRat& b : {GaussRat(R(num, den)), GaussRat(Rational(0), R(num, den)),
                                      GaussRat(R(num, den), R(num, den)), GaussRat(R(-num, den))})
                out.push_back(b);
        }
    return out;
}

PPoint apply_k(const Map& T, PPoint w, int k) {
    for (int i = 0; i < k; ++i) w = apply(T, w);
    return w;
}

Certificate case3_exceptional(const Setup& s, int n, const std::vector<GaussRat>& lambdas) {
    Certificate c = skeleton(s, n);
    const long d = s.d;
    const HoleOrbit o = hole_orbit(s, n);
    const int ell = o.ell;
    const TMap fh = lift(s.D.induced);
    const TypeIIPoint z0(TPoly(), 1);
    const TPoly t1 = TPoly::t(1);
    struct Choice {
        GaussRat beta;
        bool reciprocal = false;
        TMap phi;
        Map T0, Q;
        std::vector<PPoint> crit;
        GaussRat w1, u0;
    };
    std::optional<Choice> choice;
    for (const auto& beta : small_height(96)) {
        for (bool recip : {false, true}) {
            const TPoly zero = t1 - TPoly(beta * beta) * t1;
            TMap bump = recip ? ratio(t1, zero) : ratio(zero, t1);
            TMap phi = tmul(bump, fh);
            auto orb = orbit_of(phi, z0, n);
            if (orb[ell] != z0) continue;
            Map T0 = image_and_tangent(phi, z0).tangent;
            if (T0.degree() != 2) continue;
            bool rational = false;
            auto crit = critical_points(T0, rational);
            if (!rational) continue;
            // Critical directions never reach the Gauss direction within n steps.
            bool ok = true;
            for (const auto& cp : crit) {
                Direction v = Direction::from_point(cp);
                for (int k = 0; k < n && ok; ++k) {
                    v = tangent_image(image_and_tangent(phi, orb[k]), v);
                    if (v == direction_of(orb[k + 1], TypeIIPoint::gauss())) ok = false;
                }
            }
            if (!ok) continue;
            const Direction g1 = direction_of(orb[1], TypeIIPoint::gauss());
            auto pre = preimage_factor(T0, g1.as_point());
            if (!pre || pre->degree() != 1) continue;
            UPoly pu = dehomogenize(*pre);
            GaussRat w1 = -pu[0] / pu[1];
            Map Q = composite_tangent(phi, z0, ell);
            auto qf = preimage_factor(Q, PPoint::at(w1));
            if (!qf) continue;
            std::optional<GaussRat> u0;
            for (const auto& r : gaussian_roots(dehomogenize(*qf)))
                if (r != w1) {
                    u0 = r;
                    break;
                }
            if (!u0) continue;
            choice = Choice{beta, recip, phi, T0, Q, crit, w1, *u0};
            break;
        }
        if (choice) break;
    }
    if (!choice) throw BetaSearchExhausted("case 3 exceptional: no beta of small height satisfies the conditions");
    const Choice& ch0 = *choice;
    // Lambda genericity (i)-(iii) for the composite tangent map Q = T^l at zeta_0.
    auto lambda_ok = [&](const GaussRat& lam) {
        if (lam.is_zero() || lam.is_one()) return false;
        const PPoint u = PPoint::at(ch0.u0 + lam * (ch0.w1 - ch0.u0));
        const PPoint w1 = PPoint::at(ch0.w1);
        for (int k = 0; k * ell < n; ++k) {
            PPoint qk = apply_k(ch0.Q, u, k);
            if (qk == w1) return false;
            if (k >= 1 && qk == u) return false;
            if (std::find(ch0.crit.begin(), ch0.crit.end(), qk) != ch0.crit.end()) return false;
            for (const auto& cp : ch0.crit)
                if (apply_k(ch0.Q, cp, k) == u) return false;
        }
        return true;
    };
    std::vector<GaussRat> lams;
    std::vector<GaussRat> rejected;
    for (const auto& l : usable_lambdas(lambdas)) {
        GaussRat cur = l;
        while (!lambda_ok(cur)) {
            rejected.push_back(cur);
            std::vector<GaussRat> used = lams;
            used.insert(used.end(), rejected.begin(), rejected.end());
            used.insert(used.end(), lambdas.begin(), lambdas.end());
            cur = next_lambda(used);
        }
        lams.push_back(cur);
    }
    const Rational mum = mu_minus(static_cast<Depth>(dpow(d, n).get_num().get_si()));
    auto attempt = [&](const Rational& N) {
        FamilySpec fam;
        fam.label = "g";
        fam.kind = CaseKind::Case3;
        fam.lambdas = lams;
        fam.zeta0 = z0;
        fam.conjugator = affine_chart(z0);
        param(fam, "N", str(N));
        param(fam, "ell", str(static_cast<long long>(ell)));
        param(fam, "branch", "exceptional");
        param(fam, "beta", ch0.beta.to_string());
        param(fam, "orientation", ch0.reciprocal ? "reciprocal" : "direct");
        param(fam, "w1", ch0.w1.to_string());
        param(fam, "u0", ch0.u0.to_string());
        std::string rj;
        for (const auto& r : rejected) rj += (rj.empty() ? "" : ",") + r.to_string();
        if (!rj.empty()) param(fam, "lambda_rejected", rj);
        auto& ch = fam.checks;
        TMap common = tmul(ch0.phi, other_holes(s.D, {o.h[0]}, N));
        const Rational dn = dpow(d, n);
        const Rational dfn = prop_depth_iterate(s.base, o.h[0], n);
        auto phorb = orbit_of(ch0.phi, z0, n);
        std::vector<TypeIIPoint> seg(phorb.begin(), phorb.begin() + std::max(ell, 1));
        const auto verts = hull_vertices(seg);
        for (const auto& lam : lams) {
            const std::string at = " (lambda=" + lam.to_string() + ")";
            const GaussRat a = ch0.u0 + lam * (ch0.w1 - ch0.u0);
            const TPoly at1 = TPoly::monomial(a, 1);
            TMap g = tmul(ratio(at1 - TPoly::t(N), at1 + TPoly::t(N)), common);
            fam.maps.push_back(g);
            expect(ch, "images and tangent maps agree with phi along the orbit" + at, "", compare_on(ch0.phi, g, verts));
            expect(ch, "local degree at zeta_0 is 2" + at, "2", std::to_string(image_and_tangent(g, z0).local_degree));
            expect(ch, "s(u_lambda) = 1" + at, "1", std::to_string(surplus(g, z0, Direction::res(a))));
            expect(ch, "sbar^n(w_inf) = 1 - 1/d^n - dbar_0(f^n)" + at, str(1 - 1 / dn - dfn),
                   str(surplus_iterate(g, z0, Direction::outward(), n).prop));
            expect(ch, "sbar^n(u_lambda) = 1/d" + at, str(R(1, d)), str(surplus_iterate(g, z0, Direction::res(a), n).prop));
            expect_true(ch, "1/d < mu-(d^n)" + at, R(1, d) < mum);
        }
        param(fam, "e", exponent_lcm(fam.maps[0]).get_str());
        return fam;
    };
    c.families.push_back(escalate(2, attempt));
    return c;
}

/// Periodic-hole construction; also serves Case 0 with a fixed hole when no k* >= 1 exists.
Certificate periodic_impl(const Map& f, int n, const std::vector<GaussRat>& lambdas, int variant) {
    // Probe the orbit depths on a provisional normalization.
    Setup probe = make_setup(f, n, normalizer_finite_orbit(f, n));
    const HoleOrbit o = hole_orbit(probe, n);
    Depth sum = 0;
    for (int j = 0; j < o.ell; ++j) sum += o.dep[j];
    if (sum >= 3) return case3_generic(probe, n, lambdas, variant);
    // Exceptional: h_0 -> 0, h_1 -> infinity.
    CaseTag tag = classify_case(f, n);
    const PPoint h0 = tag.bad_hole;
    const PPoint h1 = apply(decompose(f).induced, h0);
    Map N;
    if (h1.inf) N = mobius(1, h0.z, 0, 1);
    else if (h0.inf) N = mobius(h1.z, 1, 1, 0);
    else N = mobius(h1.z, h0.z, 1, 1);
    return case3_exceptional(make_setup(f, n, N), n, lambdas);
}

}  // namespace

Certificate build_case3(const Map& f0, int n, const std::vector<GaussRat>& lambdas) {
    const Map f = canonical(f0);
    if (!is_n_unstable(f, n) || classify_case(f, n).kind != CaseKind::Case3)
        throw NotApplicable("build_case3: not in Case 3");
    return periodic_impl(f, n, lambdas, 0);
}


// ---------------------------------------------------------------- driver

namespace {

bool complete(Certificate& c) {
    c.limits.clear();
    for (std::size_t fi = 0; fi < c.families.size(); ++fi)
        for (std::size_t s = 0; s < c.families[fi].maps.size(); ++s)
            c.limits.push_back(compute_limit(c.families[fi], static_cast<int>(fi), static_cast<int>(s), c.n));
    Distinctness dist = assess_distinctness(c);
    c.distinctness = dist.method;
    c.distinctness_details = dist.details;
    return dist.ok;
}

Certificate build_kind(const Map& f, int n, CaseKind kind, const std::vector<GaussRat>& lambdas, int variant) {
    switch (kind) {
        case CaseKind::Case0:
        case CaseKind::Case2: return case02_impl(f, n, lambdas, variant);
        case CaseKind::Case1: return case1_impl(f, n, lambdas, variant);
        case CaseKind::Case3: return periodic_impl(f, n, lambdas, variant);
        case CaseKind::Case4: return build_case4(f, n, lambdas);
        case CaseKind::Case5: return build_case5(f, n, lambdas);
        default: throw NotApplicable("make_certificate: no construction for " + case_name(kind));
    }
}

/// Samples of the lambda family whose class coincides with an earlier sample's.
std::vector<std::size_t> colliding_samples(const Certificate& c) {
    std::vector<std::size_t> out;
    for (std::size_t fi = 0; fi < c.families.size(); ++fi) {
        if (c.families[fi].maps.size() < 2) continue;
        std::vector<const LimitRecord*> ls;
        for (const auto& r : c.limits)
            if (r.family == static_cast<int>(fi)) ls.push_back(&r);
        for (std::size_t j = 1; j < ls.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (!distinct_reason(*ls[i], *ls[j])) {
                    out.push_back(j);
                    break;
                }
        break;
    }
    return out;
}

}  // namespace

Certificate make_certificate(const Map& f0, int n, const std::vector<GaussRat>& lambdas) {
    if (n < 2) throw std::invalid_argument("make_certificate: n must be at least 2");
    const Map f = canonical(f0);
    if (!is_semistable(f)) throw NotApplicable("make_certificate: map is not semistable");
    Decomposition D = decompose(f);
    if (D.induced_degree() == 0 && (is_in_Id(D) || is_n_unstable(f, n))) {
        Certificate c = build_constant(f, n, lambdas);
        complete(c);
        return c;
    }
    if (!is_n_unstable(f, n)) throw NotApplicable("make_certificate: map is in neither I(d) nor U_n");
    const CaseKind kind = classify_case(f, n).kind;
    // Free offsets first (keeps the requested samples), then deterministic resampling of colliding lambdas.
    const bool has_offsets = kind == CaseKind::Case1 || kind == CaseKind::Case3;
    Certificate first;
    for (int variant = 0; variant < (has_offsets ? 4 : 1); ++variant) {
        Certificate c = build_kind(f, n, kind, lambdas, variant);
        if (complete(c)) return c;
        if (variant == 0) first = std::move(c);
    }
    std::vector<GaussRat> lams = usable_lambdas(lambdas), used = lams;
    std::vector<std::string> swaps;
    Certificate c = first;
    for (int round = 0; round < 4; ++round) {
        auto bad = colliding_samples(c);
        if (bad.empty()) break;
        for (auto j : bad) {
            GaussRat nl = next_lambda(used);
            used.push_back(nl);
            swaps.push_back(lams[j].to_string() + "->" + nl.to_string());
            lams[j] = nl;
        }
        c = build_kind(f, n, kind, lams, 0);
        const bool ok = complete(c);
        std::string rec;
        for (const auto& w : swaps) rec += (rec.empty() ? "" : ",") + w;
        for (auto& fam : c.families)
            if (!fam.lambdas.empty()) fam.parameters.push_back({"lambda_resampled", rec});
        if (ok) return c;
    }
    return c;
}

}  // namespace degmap
