#include "degmap/projmap.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace degmap {

// ---------------------------------------------------------------- Gaussian integers

namespace {

struct GInt {
    Integer re, im;
    bool is_zero() const { return re == 0 && im == 0; }
};

Integer round_div(const Integer& a, const Integer& n) {
    // nearest integer to a/n, n > 0
    Integer twice = 2 * a + n;
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), Integer(2 * n).get_mpz_t());
    return q;
}

GInt gmod(const GInt& a, const GInt& b) {
    Integer n = b.re * b.re + b.im * b.im;
    Integer xr = a.re * b.re + a.im * b.im;
    Integer xi = a.im * b.re - a.re * b.im;
    Integer qr = round_div(xr, n), qi = round_div(xi, n);
    return {a.re - (qr * b.re - qi * b.im), a.im - (qr * b.im + qi * b.re)};
}

GInt ggcd(GInt a, GInt b) {
    while (!b.is_zero()) {
        GInt r = gmod(a, b);
        a = b;
        b = r;
    }
    return a;
}

GInt gexact_div(const GInt& a, const GInt& b) {
    Integer n = b.re * b.re + b.im * b.im;
    Integer xr = a.re * b.re + a.im * b.im;
    Integer xi = a.im * b.re - a.re * b.im;
    return {Integer(xr / n), Integer(xi / n)};
}

}  // namespace

Map canonical(const Map& f) {
    if (f.p.degree() != f.q.degree()) throw DegreeMismatch("map: P and Q degrees differ");
    std::vector<const GaussRat*> all;
    for (const auto& x : f.p.c) all.push_back(&x);
    for (const auto& x : f.q.c) all.push_back(&x);
    Integer l = 1;
    bool any = false;
    for (auto* x : all) {
        if (x->is_zero()) continue;
        any = true;
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x->re().get_den_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x->im().get_den_mpz_t());
    }
    if (!any) throw std::domain_error("map: both coordinates vanish identically");
    std::vector<GInt> ints;
    GInt g{0, 0};
    for (auto* x : all) {
        Rational r = x->re() * l, i = x->im() * l;
        ints.push_back({r.get_num(), i.get_num()});
        if (!ints.back().is_zero()) g = ggcd(g, ints.back());
    }
    for (auto& v : ints)
        if (!v.is_zero()) v = gexact_div(v, g);
    // Unit normalization on the first nonzero coefficient.
    const GInt* first = nullptr;
    for (const auto& v : ints)
        if (!v.is_zero()) {
            first = &v;
            break;
        }
    GInt w = *first;
    int rot = 0;  // multiply by i^rot
    for (; rot < 4; ++rot) {
        if (w.re > 0 || (w.re == 0 && w.im > 0)) break;
        w = {-w.im, w.re};
    }
    auto rotate = [rot](GInt v) {
        for (int k = 0; k < rot; ++k) v = {-v.im, v.re};
        return v;
    };
    Map out{Poly::zero(f.degree()), Poly::zero(f.degree())};
    const std::size_t n = f.p.c.size();
    for (std::size_t k = 0; k < ints.size(); ++k) {
        GInt v = rotate(ints[k]);
        GaussRat val{Rational(v.re), Rational(v.im)};
        if (k < n) out.p.c[k] = val;
        else out.q.c[k - n] = val;
    }
    return out;
}

Map make_map(const Poly& p, const Poly& q) { return canonical(Map{p, q}); }

Map mobius(const GaussRat& a, const GaussRat& b, const GaussRat& c, const GaussRat& d) {
    if ((a * d - b * c).is_zero()) throw std::domain_error("mobius: singular matrix");
    return Map{Poly({b, a}), Poly({d, c})};
}

Map mobius_inverse(const Map& m) {
    if (m.degree() != 1) throw DegreeMismatch("mobius_inverse: degree must be 1");
    const GaussRat &a = m.p.c[1], &b = m.p.c[0], &c = m.q.c[1], &d = m.q.c[0];
    return mobius(d, -b, -c, a);
}

Map mobius_to_01inf(const PPoint& z1, const PPoint& z2, const PPoint& z3) {
    GaussRat x1 = z1.x(), y1 = z1.y(), x2 = z2.x(), y2 = z2.y(), x3 = z3.x(), y3 = z3.y();
    GaussRat k1 = x2 * y3 - y2 * x3, k3 = x2 * y1 - y2 * x1;
    return mobius(k1 * y1, -(k1 * x1), k3 * y3, -(k3 * x3));
}

Map conjugate(const Map& f, const Map& m) { return canonical(mobius_inverse(m).compose(f.compose(m))); }

TMap lift(const Map& f) { return {lift(f.p), lift(f.q)}; }

PPoint apply(const Map& f, const PPoint& z) {
    GaussRat x = z.x(), y = z.y();
    GaussRat a = f.p.eval(x, y), b = f.q.eval(x, y);
    if (a.is_zero() && b.is_zero()) throw std::domain_error("apply: map undefined at " + z.to_string());
    return PPoint::from_xy(a, b);
}

std::string map_to_string(const Map& f) { return "[" + poly_to_string(f.p) + " : " + poly_to_string(f.q) + "]"; }

// ---------------------------------------------------------------- resultant / decomposition

GaussRat resultant(const Poly& p, const Poly& q) {
    if (p.degree() != q.degree()) throw DegreeMismatch("resultant: degrees differ");
    const int d = p.degree();
    if (d < 1) throw DegreeMismatch("resultant: degree must be >= 1");
    const int n = 2 * d;
    std::vector<std::vector<GaussRat>> m(n, std::vector<GaussRat>(n));
    for (int r = 0; r < d; ++r)
        for (int j = 0; j <= d; ++j) {
            m[r][r + j] = p.c[d - j];
            m[d + r][r + j] = q.c[d - j];
        }
    GaussRat det(1);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!m[r][col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) return GaussRat();
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        GaussRat inv = m[col][col].inverse();
        for (int r = col + 1; r < n; ++r) {
            if (m[r][col].is_zero()) continue;
            GaussRat f = m[r][col] * inv;
            for (int k = col; k < n; ++k) m[r][k] -= f * m[col][k];
        }
    }
    return det;
}

Decomposition decompose(const Map& f0) {
    Map f = canonical(f0);
    Decomposition D;
    D.d = f.degree();
    Poly g = gcd(f.p, f.q);
    D.induced = canonical(Map{exact_div(f.p, g), exact_div(f.q, g)});
    D.h = D.induced.p.is_zero() ? exact_div(f.q, D.induced.q) : exact_div(f.p, D.induced.p);
    if (D.h * D.induced.p != f.p || D.h * D.induced.q != f.q)
        throw std::logic_error("decompose: factorization check failed");

    UPoly u = dehomogenize(D.h);
    const int yinf = D.h.degree() - u.degree();
    std::vector<HoleEntry> split, clusters;
    if (yinf > 0) split.push_back({true, PPoint::infinity(), linear_form(PPoint::infinity()), yinf});
    for (const auto& [factor, mult] : squarefree(u)) {
        UPoly rest = factor;
        for (const auto& r : gaussian_roots(factor)) {
            split.push_back({true, PPoint::at(r), linear_form(PPoint::at(r)), mult});
            rest = rest.exact_div(UPoly::linear_root(r));
        }
        if (rest.degree() >= 1) clusters.push_back({false, PPoint(), homogenize(rest.monic(), rest.degree()), mult});
    }
    std::sort(split.begin(), split.end(), [](const HoleEntry& a, const HoleEntry& b) { return a.point < b.point; });
    std::sort(clusters.begin(), clusters.end(), [](const HoleEntry& a, const HoleEntry& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.factor.degree() < b.factor.degree();
    });
    D.holes = std::move(split);
    D.holes.insert(D.holes.end(), clusters.begin(), clusters.end());
    return D;
}

Depth depth(const Map& f, const PPoint& z) {
    Poly g = gcd(f.p, f.q);
    return point_order(g, z);
}

int local_multiplicity(const Map& g, const PPoint& z) {
    if (g.degree() < 1) throw std::domain_error("local_multiplicity: degree 0 map");
    PPoint w = apply(g, z);
    Poly F = g.p.scaled(w.y()) - g.q.scaled(w.x());
    return point_order(F, z);
}

bool is_in_Id(const Decomposition& D) {
    if (D.induced_degree() != 0) return false;
    PPoint c = PPoint::from_xy(D.induced.p.c[0], D.induced.q.c[0]);
    return point_order(D.h, c) > 0;
}

bool is_in_Id(const Map& f) { return is_in_Id(decompose(f)); }

std::vector<HoleGroup> hole_groups(const Decomposition& D) {
    std::vector<HoleGroup> out;
    for (const auto& e : D.holes) out.push_back({e.factor, e.depth});
    return out;
}

namespace {

Poly fixed_point_poly(const Map& g) {
    Poly X = Poly::monomial(1, 0), Y = Poly::monomial(0, 1);
    return X * g.q - Y * g.p;
}

bool has_fixed_root(const Poly& factor, const Poly& fix) {
    if (fix.is_zero()) return true;
    return gcd(factor, fix).degree() >= 1;
}

bool verdict(const std::vector<HoleGroup>& groups, const Map& induced, Depth D, bool stable) {
    Poly fix = fixed_point_poly(induced);
    for (const auto& g : groups) {
        Depth m2 = 2 * g.mult;
        if (stable) {
            if (m2 > D) return false;
            if (m2 >= D - 1 && has_fixed_root(g.factor, fix)) return false;
        } else {
            if (m2 > D + 1) return false;
            if (m2 >= D && has_fixed_root(g.factor, fix)) return false;
        }
    }
    return true;
}

Depth ipow(Depth b, int e) {
    Depth r = 1;
    for (int k = 0; k < e; ++k) {
        if (r > (Depth(1) << 62) / std::max<Depth>(b, 1)) throw std::overflow_error("depth overflow");
        r *= b;
    }
    return r;
}

}  // namespace

bool semistable_from_groups(const std::vector<HoleGroup>& groups, const Map& induced, Depth D) {
    return verdict(groups, induced, D, false);
}

bool stable_from_groups(const std::vector<HoleGroup>& groups, const Map& induced, Depth D) {
    return verdict(groups, induced, D, true);
}

bool is_semistable(const Map& f) {
    Decomposition D = decompose(f);
    return semistable_from_groups(hole_groups(D), D.induced, D.d);
}

bool is_stable(const Map& f) {
    Decomposition D = decompose(f);
    return stable_from_groups(hole_groups(D), D.induced, D.d);
}

Rational mu_minus(Depth d) {
    if (d < 2) throw std::invalid_argument("mu_minus: d >= 2 required");
    if (d % 2 == 0) return make_rat(1, 2);
    Rational r(Integer(static_cast<long>(d - 1)), Integer(static_cast<long>(2 * d)));
    r.canonicalize();
    return r;
}

Rational mu_plus(Depth d) { return Rational(1 - mu_minus(d)); }

// ---------------------------------------------------------------- iteration

Map iterate_compose(const Map& f, int n, long budget) {
    if (n < 1) throw std::invalid_argument("iterate_compose: n >= 1");
    long total = 1;
    for (int k = 0; k < n; ++k) {
        total *= f.degree();
        if (total > budget) throw BudgetExceeded("iterate_compose: degree exceeds budget");
    }
    Map r = canonical(f);
    for (int k = 2; k <= n; ++k) r = canonical(f.compose(r));
    return r;
}

FactoredIterate iterate_factored(const Map& f, int n) {
    if (n < 1) throw std::invalid_argument("iterate_factored: n >= 1");
    Decomposition D = decompose(f);
    if (is_in_Id(D)) throw InIndeterminacy("iterate_factored: map lies in I(d)");
    FactoredIterate out;
    out.degree = ipow(D.d, n);
    Map identity{Poly::monomial(1, 0), Poly::monomial(0, 1)};
    Map gk = identity;
    for (int k = 0; k < n; ++k) {
        if (k > 0) gk = canonical(D.induced.compose(gk));
        out.hole_factors.push_back({D.h.compose(gk.p, gk.q), ipow(D.d, n - k - 1)});
    }
    out.induced = canonical(D.induced.compose(gk));
    if (n == 1) out.induced = D.induced;
    return out;
}

std::vector<HoleGroup> FactoredIterate::groups() const {
    struct G {
        UPoly f;
        Depth m;
    };
    std::vector<G> gs;
    Depth inf_mult = 0;
    auto insert = [&gs](UPoly a, Depth m) {
        std::vector<G> next;
        for (auto& g : gs) {
            UPoly c = gcd(a, g.f);
            if (c.degree() >= 1) {
                UPoly rest = g.f.exact_div(c);
                if (rest.degree() >= 1) next.push_back({rest, g.m});
                next.push_back({c, g.m + m});
                a = a.exact_div(c);
            } else {
                next.push_back(g);
            }
        }
        if (a.degree() >= 1) next.push_back({a.monic(), m});
        gs = std::move(next);
    };
    for (const auto& [F, e] : hole_factors) {
        if (F.is_zero()) throw std::logic_error("hole factor vanishes identically");
        UPoly u = dehomogenize(F);
        inf_mult += e * (F.degree() - u.degree());
        for (const auto& [s, i] : squarefree(u)) insert(s, e * i);
    }
    std::vector<HoleGroup> out;
    for (const auto& g : gs) out.push_back({homogenize(g.f, g.f.degree()), g.m});
    if (inf_mult > 0) out.push_back({linear_form(PPoint::infinity()), inf_mult});
    return out;
}

Poly FactoredIterate::hole_poly() const {
    Poly r = Poly::constant(GaussRat(1));
    for (const auto& [F, e] : hole_factors) r = r * F.pow(static_cast<unsigned>(e));
    return r;
}

Depth depth_iterate(const Map& f, const PPoint& z, int n) {
    if (n < 1) throw std::invalid_argument("depth_iterate: n >= 1");
    Decomposition D = decompose(f);
    if (is_in_Id(D)) throw InIndeterminacy("depth_iterate: map lies in I(d)");
    const Depth d = D.d;
    Depth total = ipow(d, n - 1) * point_order(D.h, z);
    if (D.induced_degree() == 0) return total;
    PPoint w = z;
    Depth mult = 1;  // m_z(f̂^k)
    for (int k = 1; k < n; ++k) {
        mult *= local_multiplicity(D.induced, w);
        w = apply(D.induced, w);
        Depth dw = point_order(D.h, w);
        if (dw) total += ipow(d, n - 1 - k) * mult * dw;
    }
    return total;
}

Rational prop_depth_iterate(const Map& f, const PPoint& z, int n) {
    Rational r(Integer(static_cast<long>(depth_iterate(f, z, n))), Integer(static_cast<long>(ipow(f.degree(), n))));
    r.canonicalize();
    return r;
}

bool is_semistable_iterate(const Map& f, int n) {
    FactoredIterate fi = iterate_factored(f, n);
    return semistable_from_groups(fi.groups(), fi.induced, fi.degree);
}

bool is_n_unstable(const Map& f, int n) {
    if (n < 1) throw std::invalid_argument("is_n_unstable: n >= 1");
    Decomposition D = decompose(f);
    if (!semistable_from_groups(hole_groups(D), D.induced, D.d)) return false;
    if (is_in_Id(D)) return false;
    return !is_semistable_iterate(f, n);
}

PPoint bad_hole(const Map& f, int n) {
    if (!is_n_unstable(f, n)) throw NotUnstable("bad_hole: map is not n-unstable");
    Decomposition D = decompose(f);
    const Depth total = ipow(D.d, n);
    std::vector<PPoint> bad;
    std::vector<HoleGroup> groups;
    for (const auto& e : D.holes) {
        if (e.split) {
            if (2 * depth_iterate(f, e.point, n) >= total) bad.push_back(e.point);
            continue;
        }
        if (groups.empty()) groups = iterate_factored(f, n).groups();
        for (const auto& g : groups)
            if (2 * g.mult >= total && gcd(g.factor, e.factor).degree() >= 1)
                throw UnsplitFactor("bad_hole: deep hole lies in an unsplit cluster");
    }
    if (bad.size() != 1)
        throw NonUniqueBadHole("bad_hole: found " + std::to_string(bad.size()) + " candidate holes");
    return bad.front();
}

std::string case_name(CaseKind k) {
    switch (k) {
        case CaseKind::NotUnstable: return "NotUnstable";
        case CaseKind::Case0: return "Case0";
        case CaseKind::Case1: return "Case1";
        case CaseKind::Case2: return "Case2";
        case CaseKind::Case3: return "Case3";
        case CaseKind::Case4: return "Case4";
        case CaseKind::Case5: return "Case5";
        case CaseKind::ConstantInduced: return "ConstantInduced";
    }
    return "?";
}

CaseTag classify_case(const Map& f, int n) {
    PPoint h = bad_hole(f, n);
    Decomposition D = decompose(f);
    CaseTag tag;
    tag.bad_hole = h;
    tag.bad_depth = point_order(D.h, h);
    tag.orbit.push_back(h);
    if (D.induced_degree() == 0) {
        tag.kind = CaseKind::ConstantInduced;
        return tag;
    }
    const Map& g = D.induced;
    // Forward orbit, stopping at re-entry or after n distinct points.
    while (static_cast<int>(tag.orbit.size()) < std::max(n, 3)) {
        tag.multiplicities.push_back(local_multiplicity(g, tag.orbit.back()));
        PPoint next = apply(g, tag.orbit.back());
        auto it = std::find(tag.orbit.begin(), tag.orbit.end(), next);
        if (it != tag.orbit.end()) {
            tag.cycle_start = static_cast<int>(it - tag.orbit.begin());
            break;
        }
        tag.orbit.push_back(next);
    }
    if (tag.multiplicities.size() < tag.orbit.size()) tag.multiplicities.push_back(local_multiplicity(g, tag.orbit.back()));
    const int size = static_cast<int>(tag.orbit.size());
    const bool closed = tag.cycle_start >= 0;
    const Depth d = D.d;
    if (tag.bad_depth >= 2) {
        if (!closed || size >= n) {
            tag.kind = CaseKind::Case0;
        } else if (tag.cycle_start > 0) {
            tag.kind = CaseKind::Case1;
        } else {
            bool super = false;
            for (int j = 0; j < size; ++j) super = super || tag.multiplicities[j] >= 2;
            tag.kind = super ? CaseKind::Case2 : CaseKind::Case3;
        }
        return tag;
    }
    if (!closed || tag.cycle_start != 0 || size > 2)
        throw std::logic_error("classify_case: depth-1 bad hole with orbit outside cases 4/5");
    if (size == 1) {
        tag.kind = CaseKind::Case4;
        Map N = h.inf ? mobius(1, 0, 0, 1) : mobius(h.z, 1, 1, 0);
        Map conj = conjugate(g, N);
        bool poly = conj.degree() == d - 1;
        for (int j = 1; j <= conj.degree() && poly; ++j) poly = conj.q.c[j].is_zero();
        if (!poly) throw std::logic_error("classify_case: Case 4 induced map is not a degree d-1 polynomial");
        tag.normalizer = N;
    } else {
        tag.kind = CaseKind::Case5;
        const PPoint& h1 = tag.orbit[1];
        Map N = h.inf ? mobius(1, h1.z, 0, 1) : (h1.inf ? mobius(h.z, 1, 1, 0) : mobius(h.z, h1.z, 1, 1));
        Map conj = conjugate(g, N);
        bool mono = conj.degree() == d - 1;
        for (int j = 0; j <= conj.degree() && mono; ++j) {
            if (j != 0) mono = conj.p.c[j].is_zero();
            if (mono && j != d - 1) mono = conj.q.c[j].is_zero();
        }
        if (!mono) throw std::logic_error("classify_case: Case 5 induced map is not conjugate to c z^{-(d-1)}");
        tag.normalizer = N;
    }
    return tag;
}

// ---------------------------------------------------------------- GIT comparison

Fingerprint fingerprint(const Map& f) {
    Decomposition D = decompose(f);
    Fingerprint fp;
    for (const auto& e : D.holes) fp.depths.push_back({e.depth, e.cluster_degree()});
    std::sort(fp.depths.begin(), fp.depths.end());
    fp.induced_degree = D.induced_degree();
    return fp;
}

namespace {

/// z -> a sends a to 0 and b to infinity.
Map mobius_0inf(const PPoint& a, const PPoint& b) { return mobius(a.y(), -a.x(), b.y(), -b.x()); }

bool scaling_equivalent(const Map& g, const Map& h) {
    // Is there a != 0 with z -> a z conjugating g to h (up to projective scale)?
    const int d = g.degree();
    std::vector<std::pair<int, GaussRat>> ratios;  // (weight, h/g)
    for (int side = 0; side < 2; ++side) {
        const Poly& gp = side == 0 ? g.p : g.q;
        const Poly& hp = side == 0 ? h.p : h.q;
        for (int j = 0; j <= d; ++j) {
            if (gp.c[j].is_zero() != hp.c[j].is_zero()) return false;
            if (gp.c[j].is_zero()) continue;
            ratios.push_back({d - j + (side == 0 ? 1 : 0), hp.c[j] / gp.c[j]});
        }
    }
    const int w0 = ratios[0].first;
    const GaussRat r0 = ratios[0].second;
    long G = 0;
    std::vector<long> e;
    std::vector<GaussRat> x;
    for (const auto& [w, r] : ratios) {
        e.push_back(w - w0);
        x.push_back(r / r0);
        G = std::gcd(G, std::labs(w - w0));
    }
    if (G == 0) {
        for (const auto& v : x)
            if (!v.is_one()) return false;
        return true;
    }
    // y = prod x_k^{u_k} with sum u_k e_k = G.
    auto power = [](const GaussRat& b, long k) { return k >= 0 ? b.pow(k) : b.inverse().pow(-k); };
    long cur = 0;
    GaussRat y(1);
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] == 0) continue;
        if (cur == 0) {
            cur = e[k];
            y = x[k];
            continue;
        }
        // extended gcd of cur and e[k]
        long a = cur, b = e[k], s0 = 1, s1 = 0, t0 = 0, t1 = 1;
        while (b != 0) {
            long q = a / b;
            long tmp = a - q * b;
            a = b;
            b = tmp;
            tmp = s0 - q * s1;
            s0 = s1;
            s1 = tmp;
            tmp = t0 - q * t1;
            t0 = t1;
            t1 = tmp;
        }
        y = power(y, s0) * power(x[k], t0);
        cur = a;
    }
    if (cur < 0) {
        cur = -cur;
        y = y.inverse();
    }
    for (std::size_t k = 0; k < e.size(); ++k)
        if (power(y, e[k] / cur) != x[k]) return false;
    return true;
}

}  // namespace

bool git_equal_stable(const Map& g0, const Map& h0) {
    if (g0.degree() != h0.degree()) throw DegreeMismatch("git_equal_stable: degrees differ");
    if (!is_stable(g0) || !is_stable(h0)) throw NotStable("git_equal_stable: inputs must be stable");
    Map g = canonical(g0), h = canonical(h0);
    if (g == h) return true;
    Decomposition Dg = decompose(g), Dh = decompose(h);
    if (!(fingerprint(g) == fingerprint(h))) return false;

    std::vector<const HoleEntry*> sg, sh;
    std::vector<Depth> cluster_depths_h;
    for (const auto& e : Dg.holes)
        if (e.split) sg.push_back(&e);
    for (const auto& e : Dh.holes) {
        if (e.split) sh.push_back(&e);
        else cluster_depths_h.push_back(e.depth);
    }
    std::vector<const HoleEntry*> anchors;
    for (const auto* e : sg)
        if (std::find(cluster_depths_h.begin(), cluster_depths_h.end(), e->depth) == cluster_depths_h.end())
            anchors.push_back(e);
    if (anchors.size() >= 3) {
        // Any conjugacy sends the anchors to split holes of h of equal depth: enumeration is complete.
        const HoleEntry *a1 = anchors[0], *a2 = anchors[1], *a3 = anchors[2];
        Map Ta = mobius_to_01inf(a1->point, a2->point, a3->point);
        for (const auto* b1 : sh) {
            if (b1->depth != a1->depth) continue;
            for (const auto* b2 : sh) {
                if (b2 == b1 || b2->depth != a2->depth) continue;
                for (const auto* b3 : sh) {
                    if (b3 == b1 || b3 == b2 || b3->depth != a3->depth) continue;
                    Map Tb = mobius_to_01inf(b1->point, b2->point, b3->point);
                    Map M = mobius_inverse(Tb).compose(Ta);  // M(a_i) = b_i
                    if (conjugate(g, mobius_inverse(M)) == h) return true;
                }
            }
        }
        return false;
    }
    if (anchors.size() == 2) {
        // Normalize the anchors to 0 and infinity; a conjugacy fixing both is a scaling.
        const HoleEntry *a0 = anchors[0], *a1 = anchors[1];
        Map gn = conjugate(g, mobius_inverse(mobius_0inf(a0->point, a1->point)));
        for (const auto* b0 : sh) {
            if (b0->depth != a0->depth) continue;
            for (const auto* b1 : sh) {
                if (b1 == b0 || b1->depth != a1->depth) continue;
                Map hn = conjugate(h, mobius_inverse(mobius_0inf(b0->point, b1->point)));
                if (scaling_equivalent(gn, hn)) return true;
            }
        }
        return false;
    }
    throw TooFewSplitHoles("git_equal_stable: hole configuration does not determine a conjugacy test");
}

}  // namespace degmap
