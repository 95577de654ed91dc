#include "degmap/berkspace.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace degmap {

namespace {

std::atomic<bool> g_surplus_checks{false};
std::atomic<long long> g_surplus_count{0};

/// val(x) >= bound, with val(0) = +inf.
bool val_at_least(const TPoly& x, const Rational& bound) {
    auto v = x.val();
    return !v || *v >= bound;
}

Map identity_map() { return Map{Poly({GaussRat(0), GaussRat(1)}), Poly({GaussRat(1), GaussRat(0)})}; }

/// Split the square-free c into pieces whose roots have a uniform order in F (nonzero).
std::vector<std::pair<UPoly, int>> order_split(const UPoly& c, UPoly F) {
    std::vector<std::pair<UPoly, int>> out;
    UPoly rem = c.monic();
    for (int e = 0; rem.degree() >= 1; ++e) {
        UPoly g = gcd(rem, F);
        if (g.degree() < 1) g = UPoly(GaussRat(1));
        UPoly exact = rem.exact_div(g);
        if (exact.degree() >= 1) out.push_back({exact.monic(), e});
        rem = g;
        if (rem.degree() >= 1) F = F.exact_div(rem);
    }
    return out;
}

struct Piece {
    UPoly c;
    long long depth = 0, surplus = 0, mult = 0;
};

/// Refine pieces by the order of their roots in F; acc receives weight * order.
template <class Acc>
std::vector<Piece> refine(const std::vector<Piece>& in, const UPoly& F, Acc acc) {
    std::vector<Piece> out;
    for (const auto& pc : in)
        for (const auto& [sub, e] : order_split(pc.c, F)) {
            Piece q = pc;
            q.c = sub;
            acc(q, e);
            out.push_back(q);
        }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- points and directions

TypeIIPoint::TypeIIPoint(const TPoly& center, const Rational& alpha)
    : center_(center.truncate_below(alpha)), alpha_(alpha) {}

bool TypeIIPoint::contains(const TypeIIPoint& other) const {
    return other.alpha_ >= alpha_ && val_at_least(other.center_ - center_, alpha_);
}

std::string TypeIIPoint::to_string() const {
    std::ostringstream os;
    os << "xi(" << center_.to_string() << ", |t|^" << rat_to_string(alpha_) << ")";
    return os.str();
}

TypeIIPoint join(const TypeIIPoint& a, const TypeIIPoint& b) {
    Rational r = a.alpha() < b.alpha() ? a.alpha() : b.alpha();
    auto v = (a.center() - b.center()).val();
    if (v && *v < r) r = *v;
    return {a.center(), r};
}

Direction direction_of(const TypeIIPoint& xi, const TPoly& p) {
    TPoly delta = p - xi.center();
    if (!val_at_least(delta, xi.alpha())) return Direction::outward();
    return Direction::res(delta.coef(xi.alpha()));
}

Direction direction_of_infinity() { return Direction::outward(); }

Direction direction_of(const TypeIIPoint& xi, const TypeIIPoint& zeta) {
    if (xi == zeta) throw std::invalid_argument("direction_of: points coincide");
    if (xi.contains(zeta)) return direction_of(xi, zeta.center());
    return Direction::outward();
}

// ---------------------------------------------------------------- factored rational functions

int FactoredRat::degree() const {
    int a = 0, b = 0;
    for (const auto& z : zeros) a += z.second;
    for (const auto& p : poles) b += p.second;
    return std::max(a, b);
}

TMap FactoredRat::expand() const {
    if (unit.is_zero()) throw ZeroPair("FactoredRat: zero unit");
    int a = 0, b = 0;
    TPolyH P = TPolyH::constant(unit), Q = TPolyH::constant(TPoly(1));
    for (const auto& [r, m] : zeros) {
        P = P * TPolyH({-r, TPoly(1)}).pow(m);
        a += m;
    }
    for (const auto& [r, m] : poles) {
        Q = Q * TPolyH({-r, TPoly(1)}).pow(m);
        b += m;
    }
    const int d = std::max(a, b);
    P = P * TPolyH::monomial(0, d - a, TPoly(1));
    Q = Q * TPolyH::monomial(0, d - b, TPoly(1));
    return {P, Q};
}

FactoredRat FactoredRat::operator*(const FactoredRat& o) const {
    FactoredRat r = *this;
    r.unit = unit * o.unit;
    r.zeros.insert(r.zeros.end(), o.zeros.begin(), o.zeros.end());
    r.poles.insert(r.poles.end(), o.poles.begin(), o.poles.end());
    return r;
}

FactoredRat FactoredRat::pole_bump(const TPoly& p, const Rational& N) {
    FactoredRat r;
    r.zeros.push_back({p - TPoly::t(N), 1});
    r.poles.push_back({p, 1});
    return r;
}

FactoredRat FactoredRat::from_map(const Map& f0) {
    Decomposition D = decompose(f0);
    if (D.induced_degree() < 1) throw std::domain_error("FactoredRat: constant map");
    const Map& g = D.induced;
    FactoredRat r;
    auto roots = [](const Poly& P, std::vector<std::pair<TPoly, int>>& out) {
        UPoly u = dehomogenize(P);
        int found = 0;
        for (const auto& x : gaussian_roots(u)) {
            int m = root_order(u, x);
            out.push_back({TPoly(x), m});
            found += m;
        }
        if (found != u.degree()) throw UnsplitFactor("FactoredRat: factor does not split over Q(i)");
        return u.is_zero() ? GaussRat(0) : u.lead();
    };
    GaussRat lp = roots(g.p, r.zeros), lq = roots(g.q, r.poles);
    if (lp.is_zero()) throw std::domain_error("FactoredRat: map is constant infinity");
    r.unit = TPoly(lp / lq);
    return r;
}

// ---------------------------------------------------------------- leading forms and tangent maps

LeadingForm leading_form(const TPolyH& P, const TypeIIPoint& xi) {
    if (P.is_zero()) throw ZeroPair("leading_form: zero polynomial");
    const int D = P.degree();
    std::vector<TPoly> a = P.c;
    // Taylor shift a(z) -> a(center + u) by synthetic division.
    if (!xi.center().is_zero())
        for (int i = 0; i < D; ++i)
            for (int j = D - 1; j >= i; --j)
                if (!a[j + 1].is_zero()) a[j] += xi.center() * a[j + 1];
    std::optional<Rational> best;
    std::vector<Rational> key(D + 1);
    for (int k = 0; k <= D; ++k) {
        if (a[k].is_zero()) continue;
        key[k] = *a[k].val() + xi.alpha() * k;
        if (!best || key[k] < *best) best = key[k];
    }
    LeadingForm L{Poly::zero(D), *best};
    for (int k = 0; k <= D; ++k)
        if (!a[k].is_zero() && key[k] == *best) L.form.c[k] = a[k].lowest_coef();
    return L;
}

TangentData image_and_tangent(const TMap& phi, const TypeIIPoint& xi) {
    if (phi.p.degree() != phi.q.degree()) throw DegreeMismatch("image_and_tangent: degrees differ");
    if (phi.q.is_zero()) throw ZeroPair("image_and_tangent: Q vanishes identically");
    const LeadingForm LQ = leading_form(phi.q, xi);
    TPolyH P = phi.p;
    TPoly w;
    for (int guard = 0;; ++guard) {
        if (guard > 10000) throw std::runtime_error("image_and_tangent: image center does not stabilize");
        if (P.is_zero()) throw ConstantLeadingForm("image_and_tangent: map is constant on the disk");
        const LeadingForm LP = leading_form(P, xi);
        const Rational beta = LP.v - LQ.v;
        Poly g = gcd(LP.form, LQ.form);
        Map A{exact_div(LP.form, g), exact_div(LQ.form, g)};
        if (A.degree() >= 1) {
            TangentData td;
            td.image = TypeIIPoint(w, beta);
            td.tangent = canonical(A);
            td.local_degree = A.degree();
            td.leading_pair = Map{LP.form, LQ.form};
            td.degree = phi.degree();
            if (g_surplus_checks.load()) {
                check_surplus_sum(td);
                ++g_surplus_count;
            }
            return td;
        }
        // Constant leading quotient: peel it off the image center.
        const GaussRat a = A.p.c[0] / A.q.c[0];
        const TPoly term = TPoly::monomial(a, beta);
        w += term;
        P = P - phi.q.scaled(term);
    }
}

TangentData image_and_tangent(const FactoredRat& phi, const TypeIIPoint& xi) {
    return image_and_tangent(phi.expand(), xi);
}

Direction tangent_image(const TangentData& td, const Direction& v) {
    return Direction::from_point(apply(td.tangent, v.as_point()));
}

int directional_multiplicity(const TangentData& td, const Direction& v) {
    return local_multiplicity(td.tangent, v.as_point());
}

int surplus(const TangentData& td, const Direction& v) {
    // Count preimages in B(v) of a point outside B(Tv): infinity, or the image center when Tv = Out.
    const Direction tv = tangent_image(td, v);
    const Poly& counted = tv.out ? td.leading_pair.p : td.leading_pair.q;
    return point_order(counted, v.as_point());
}

int surplus(const TMap& phi, const TypeIIPoint& xi, const Direction& v) {
    return surplus(image_and_tangent(phi, xi), v);
}

int surplus(const FactoredRat& phi, const TypeIIPoint& xi, const Direction& v) {
    return surplus(image_and_tangent(phi, xi), v);
}

std::vector<std::pair<Direction, int>> surplus_directions(const TangentData& td) {
    std::vector<std::pair<Direction, int>> out;
    Poly g = gcd(td.leading_pair.p, td.leading_pair.q);
    if (g.degree() == 0) return out;
    Decomposition D = decompose(Map{g, g});
    for (const auto& h : D.holes)
        if (h.split) out.push_back({Direction::from_point(h.point), surplus(td, Direction::from_point(h.point))});
    return out;
}

void check_surplus_sum(const TangentData& td) {
    Poly g = gcd(td.leading_pair.p, td.leading_pair.q);
    long long total = td.local_degree;
    if (g.degree() > 0) {
        Decomposition D = decompose(Map{g, g});
        for (const auto& h : D.holes) {
            if (h.split) {
                int s = surplus(td, Direction::from_point(h.point));
                if (s != h.depth)
                    throw SurplusIdentityViolated("surplus count disagrees with the reduction at " +
                                                  h.point.to_string());
                total += s;
            } else {
                total += h.depth * h.cluster_degree();
            }
        }
    }
    if (total != td.degree)
        throw SurplusIdentityViolated("degree " + std::to_string(td.degree) + " != local degree + surpluses " +
                                      std::to_string(total));
}

void set_surplus_checks(bool on) { g_surplus_checks = on; }
long long surplus_checks_performed() { return g_surplus_count.load(); }

SurplusIterate surplus_iterate(const TMap& phi, const TypeIIPoint& xi, const Direction& v, int n) {
    if (n < 1) throw std::invalid_argument("surplus_iterate: n must be >= 1");
    const long long d = phi.degree();
    SurplusIterate r;
    r.orbit.push_back(xi);
    r.directions.push_back(v);
    r.mult = 1;
    Rational dn = 1;
    for (int k = 0; k < n; ++k) {
        TangentData td = image_and_tangent(phi, r.orbit.back());
        const Direction& vk = r.directions.back();
        // s^{k+1}(v) = d s^k(v) + m^k(v) s(T^k v)
        r.surplus = d * r.surplus + r.mult * surplus(td, vk);
        r.mult *= directional_multiplicity(td, vk);
        r.orbit.push_back(td.image);
        r.directions.push_back(tangent_image(td, vk));
        dn *= Rational(static_cast<long>(d));
    }
    r.prop = Rational(static_cast<long>(r.surplus)) / dn;
    return r;
}

// ---------------------------------------------------------------- reductions

TMap identity_tmap() { return lift(identity_map()); }

TMap affine_chart(const TypeIIPoint& xi) {
    return {TPolyH({xi.center(), TPoly::t(xi.alpha())}), TPolyH({TPoly(1), TPoly()})};
}

TMap tmap_inverse(const TMap& m) {
    if (m.degree() != 1) throw DegreeMismatch("tmap_inverse: degree must be 1");
    const TPoly &a = m.p.c[1], &b = m.p.c[0], &c = m.q.c[1], &d = m.q.c[0];
    return {TPolyH({-b, d}), TPolyH({a, -c})};
}

Map coefficient_reduction(const TMap& psi) {
    std::optional<Rational> vmin;
    for (const auto* h : {&psi.p, &psi.q})
        for (const auto& x : h->c)
            if (auto v = x.val(); v && (!vmin || *v < *vmin)) vmin = v;
    if (!vmin) throw ZeroPair("coefficient_reduction: zero pair");
    Map f{Poly::zero(psi.degree()), Poly::zero(psi.degree())};
    for (int j = 0; j <= psi.degree(); ++j) {
        f.p.c[j] = psi.p.c[j].coef(*vmin);
        f.q.c[j] = psi.q.c[j].coef(*vmin);
    }
    return canonical(f);
}

namespace {

/// Divide all coefficients by the common lowest power of t.
TMap normalize_t(TMap m) {
    std::optional<Rational> vmin;
    for (const auto* h : {&m.p, &m.q})
        for (const auto& x : h->c)
            if (auto v = x.val(); v && (!vmin || *v < *vmin)) vmin = v;
    if (!vmin || *vmin == 0) return m;
    for (auto* h : {&m.p, &m.q})
        for (auto& x : h->c) x = x.shift(-*vmin);
    return m;
}

}  // namespace

Map reduce_at(const TMap& psi, const TMap& M) { return coefficient_reduction(tmap_inverse(M).compose(psi.compose(M))); }

namespace {

// Truncated series in s = t^(1/e): sorted (exponent, coefficient) pairs, exponents < precision.
using Series = std::vector<std::pair<long, GaussRat>>;
using SeriesH = std::vector<Series>;  // index j multiplies X^j Y^(deg - j)

Series to_series(const TPoly& x, long e) {
    Series s;
    for (const auto& tm : x.terms()) {
        Rational q = tm.exp * Rational(e);
        if (q.get_den() != 1 || sgn(q) < 0) throw std::logic_error("to_series: exponent outside the lattice");
        s.push_back({q.get_num().get_si(), tm.coef});
    }
    return s;
}

Series series_mul(const Series& a, const Series& b, long prec, std::vector<GaussRat>& acc, std::vector<char>& used) {
    Series out;
    if (a.empty() || b.empty() || a[0].first + b[0].first >= prec) return out;
    long hi = 0;
    for (const auto& [ea, ca] : a) {
        if (ea + b[0].first >= prec) break;
        for (const auto& [eb, cb] : b) {
            const long e = ea + eb;
            if (e >= prec) break;
            if (!used[e]) {
                used[e] = 1;
                acc[e] = ca * cb;
            } else {
                acc[e] += ca * cb;
            }
            hi = std::max(hi, e + 1);
        }
    }
    for (long e = 0; e < hi; ++e) {
        if (!used[e]) continue;
        used[e] = 0;
        if (!acc[e].is_zero()) out.push_back({e, std::move(acc[e])});
        acc[e] = GaussRat();
    }
    return out;
}

void series_add(Series& a, const Series& b) {
    Series out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(std::move(a[i++]));
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            GaussRat c = a[i].second + b[j].second;
            if (!c.is_zero()) out.push_back({a[i].first, std::move(c)});
            ++i;
            ++j;
        }
    }
    a = std::move(out);
}

struct SeriesArith {
    long prec;
    std::vector<GaussRat> acc;
    std::vector<char> used;
    explicit SeriesArith(long p) : prec(p), acc(p), used(p, 0) {}

    Series mul(const Series& a, const Series& b) { return series_mul(a, b, prec, acc, used); }

    SeriesH mul(const SeriesH& a, const SeriesH& b) {
        SeriesH r(a.size() + b.size() - 1);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].empty()) continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (b[j].empty()) continue;
                series_add(r[i + j], mul(a[i], b[j]));
            }
        }
        return r;
    }

    /// P(A, B) for the homogeneous P of degree d.
    SeriesH compose(const SeriesH& P, const SeriesH& A, const SeriesH& B) {
        const int d = static_cast<int>(P.size()) - 1;
        std::vector<SeriesH> Ap{SeriesH{Series{{0, GaussRat(1)}}}}, Bp = Ap;
        for (int k = 1; k <= d; ++k) {
            Ap.push_back(mul(Ap.back(), A));
            Bp.push_back(mul(Bp.back(), B));
        }
        SeriesH r((A.size() - 1) * d + 1);
        for (int j = 0; j <= d; ++j) {
            if (P[j].empty()) continue;
            SeriesH term = mul(Ap[j], Bp[d - j]);
            for (std::size_t k = 0; k < term.size(); ++k)
                if (!term[k].empty()) series_add(r[k], mul(P[j], term[k]));
        }
        return r;
    }
};

/// Smallest exponent in the pair; -1 when every coefficient vanishes below the precision.
long min_exponent(const SeriesH& p, const SeriesH& q) {
    long m = -1;
    for (const auto* h : {&p, &q})
        for (const auto& s : *h)
            if (!s.empty() && (m < 0 || s[0].first < m)) m = s[0].first;
    return m;
}

void shift_down(SeriesH& h, long v) {
    for (auto& s : h)
        for (auto& term : s) term.first -= v;
}

void truncate(SeriesH& h, long prec) {
    for (auto& s : h) {
        auto it = std::find_if(s.begin(), s.end(), [prec](const auto& term) { return term.first >= prec; });
        s.erase(it, s.end());
    }
}

}  // namespace

Map reduce_iterate_at(const TMap& g, int n, const TMap& M) {
    if (n < 1) throw std::invalid_argument("reduce_iterate_at: n must be >= 1");
    const TMap G = normalize_t(tmap_inverse(M).compose(g.compose(M)));
    if (n == 1) return coefficient_reduction(G);
    // Exponent lattice (1/e) Z; all coefficients of G have nonnegative valuation.
    Integer el = 1;
    for (const auto* h : {&G.p, &G.q})
        for (const auto& x : h->c) {
            Integer den = x.exponent_denominator();
            mpz_lcm(el.get_mpz_t(), el.get_mpz_t(), den.get_mpz_t());
        }
    const long e = el.get_si();
    SeriesH Gp, Gq;
    for (const auto& x : G.p.c) Gp.push_back(to_series(x, e));
    for (const auto& x : G.q.c) Gq.push_back(to_series(x, e));
    // Products of series with nonnegative valuation known mod s^prec stay known mod s^prec;
    // dividing by s^v then costs v digits. Double the working precision until n steps fit.
    for (long prec = 8 * e;; prec *= 2) {
        if (prec > (1L << 22)) throw std::runtime_error("reduce_iterate_at: precision exhausted");
        SeriesArith ar(prec);
        SeriesH P = Gp, Q = Gq;
        truncate(P, prec);
        truncate(Q, prec);
        long known = prec;
        bool ok = true;
        for (int k = 1; k < n && ok; ++k) {
            ar.prec = known;
            SeriesH P2 = ar.compose(Gp, P, Q), Q2 = ar.compose(Gq, P, Q);
            const long v = min_exponent(P2, Q2);
            if (v < 0) {
                ok = false;
                break;
            }
            shift_down(P2, v);
            shift_down(Q2, v);
            known -= v;
            truncate(P2, known);
            truncate(Q2, known);
            P = std::move(P2);
            Q = std::move(Q2);
        }
        if (!ok) continue;
        Map f{Poly::zero(static_cast<int>(P.size()) - 1), Poly::zero(static_cast<int>(Q.size()) - 1)};
        for (std::size_t j = 0; j < P.size(); ++j)
            if (!P[j].empty() && P[j][0].first == 0) f.p.c[j] = P[j][0].second;
        for (std::size_t j = 0; j < Q.size(); ++j)
            if (!Q[j].empty() && Q[j][0].first == 0) f.q.c[j] = Q[j][0].second;
        return canonical(f);
    }
}

std::pair<Map, Map> gauss_reduction(const TMap& phi) {
    Map f0 = coefficient_reduction(phi);
    return {f0, decompose(f0).induced};
}

// ---------------------------------------------------------------- depth predictions

long long depths_via_surplus(const TMap& phi, const TypeIIPoint& zeta0, int n, const Direction& v) {
    SurplusIterate it = surplus_iterate(phi, zeta0, v, n);
    const TypeIIPoint& xin = it.orbit.back();
    if (xin == zeta0) return it.surplus;
    return it.directions.back() == direction_of(xin, zeta0) ? it.surplus + it.mult : it.surplus;
}

std::vector<DepthPrediction> depths_via_surplus(const TMap& phi, const TypeIIPoint& zeta0, int n,
                                                const Poly& factor) {
    if (n < 1) throw std::invalid_argument("depths_via_surplus: n must be >= 1");
    const long long d = phi.degree();
    // T^k on residues at zeta0 and E_k = H_k ∘ T^k; ord_w E_k = m^k(w) s(T^k w).
    Map T = identity_map();
    std::vector<Poly> E;
    TypeIIPoint xi = zeta0;
    for (int k = 0; k < n; ++k) {
        TangentData td = image_and_tangent(phi, xi);
        Poly H = gcd(td.leading_pair.p, td.leading_pair.q);
        E.push_back(H.degree() == 0 ? H : H.compose(T.p, T.q));
        T = canonical(td.tangent.compose(T));
        xi = td.image;
    }
    std::optional<Poly> G;
    if (xi != zeta0) {
        PPoint target = direction_of(xi, zeta0).as_point();
        G = T.p.scaled(target.y()) - T.q.scaled(target.x());
    }
    std::vector<long long> weight(n);
    for (int k = 0; k < n; ++k) {
        weight[k] = 1;
        for (int j = k + 1; j < n; ++j) weight[k] *= d;
    }

    std::vector<DepthPrediction> out;
    UPoly u = dehomogenize(factor);
    if (factor.degree() == 1) {
        const PPoint z = u.degree() == 0 ? PPoint::infinity() : PPoint::at(-u[0] / u[1]);
        DepthPrediction p{factor, 0, 0, 0, false};
        for (int k = 0; k < n; ++k) p.surplus += weight[k] * point_order(E[k], z);
        p.mult = local_multiplicity(T, z);
        p.gauss_side = G && point_order(*G, z) > 0;
        p.depth = p.surplus + (p.gauss_side ? p.mult : 0);
        out.push_back(p);
        return out;
    }
    if (u.degree() != factor.degree()) throw std::invalid_argument("depths_via_surplus: cluster contains infinity");
    std::vector<Piece> pieces{{u.monic()}};
    for (int k = 0; k < n; ++k) {
        const long long w = weight[k];
        pieces = refine(pieces, dehomogenize(E[k]), [w](Piece& q, int e) { q.surplus += w * e; });
    }
    // Local multiplicity of T^n: order of T_q at poles, else 1 + order of the Wronskian.
    const UPoly tp = dehomogenize(T.p), tq = dehomogenize(T.q);
    const UPoly wr = tp.derivative() * tq - tp * tq.derivative();
    std::vector<Piece> mpieces;
    for (const auto& pc : pieces)
        for (const auto& [sub, e] : order_split(pc.c, tq)) {
            Piece q = pc;
            q.c = sub;
            if (e > 0) {
                q.mult = e;
                mpieces.push_back(q);
            } else {
                for (const auto& [sub2, e2] : order_split(sub, wr)) {
                    Piece r = q;
                    r.c = sub2;
                    r.mult = 1 + e2;
                    mpieces.push_back(r);
                }
            }
        }
    pieces = std::move(mpieces);
    if (G) pieces = refine(pieces, dehomogenize(*G), [](Piece& q, int e) { q.depth = e > 0 ? 1 : 0; });
    for (const auto& pc : pieces) {
        DepthPrediction p{homogenize(pc.c, pc.c.degree()), 0, pc.surplus, pc.mult, pc.depth > 0};
        p.depth = p.surplus + (p.gauss_side ? p.mult : 0);
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------- perturbation

FactoredRat perturb(const FactoredRat& phi, const std::vector<TPoly>& new_poles, const std::vector<TypeIIPoint>& gamma,
                    long N) {
    FactoredRat psi = phi;
    for (const auto& p : new_poles) psi = psi * FactoredRat::pole_bump(p, Rational(N));
    const TMap ephi = phi.expand(), epsi = psi.expand();
    for (const auto& xi : gamma) {
        TangentData a = image_and_tangent(ephi, xi), b = image_and_tangent(epsi, xi);
        if (a.image != b.image || a.tangent != b.tangent)
            throw NTooSmall("perturb: image or tangent map moved at " + xi.to_string());
        // Surplus grows by the number of new poles in each direction.
        std::vector<Direction> dirs;
        for (const auto& [v, s] : surplus_directions(a)) dirs.push_back(v);
        for (const auto& [v, s] : surplus_directions(b)) dirs.push_back(v);
        for (const auto& p : new_poles) dirs.push_back(direction_of(xi, p));
        for (const auto& v : dirs) {
            int added = 0;
            for (const auto& p : new_poles) added += direction_of(xi, p) == v;
            if (surplus(b, v) != surplus(a, v) + added)
                throw NTooSmall("perturb: surplus in direction " + v.to_string() + " at " + xi.to_string());
        }
    }
    return psi;
}

std::pair<FactoredRat, long> perturb_escalating(const FactoredRat& phi, const std::vector<TPoly>& new_poles,
                                                const std::vector<TypeIIPoint>& gamma, long N0, long n_max) {
    for (long N = std::max(1L, N0);; N *= 2) {
        try {
            return {perturb(phi, new_poles, gamma, N), N};
        } catch (const NTooSmall&) {
            if (N * 2 > n_max) throw;
        }
    }
}

}  // namespace degmap
