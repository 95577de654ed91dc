#include "degmap/poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace degmap {

PPoint PPoint::from_xy(const GaussRat& x, const GaussRat& y) {
    if (y.is_zero()) {
        if (x.is_zero()) throw std::domain_error("PPoint: [0:0]");
        return infinity();
    }
    return at(x / y);
}

PPoint PPoint::parse(const std::string& s) {
    if (s == "inf" || s == "infinity") return infinity();
    return at(GaussRat::parse(s));
}

// ---------------------------------------------------------------- UPoly

UPoly::UPoly(std::vector<GaussRat> c) : c_(std::move(c)) { trim(); }

void UPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

UPoly UPoly::monic() const {
    if (c_.empty()) return *this;
    return *this * lead().inverse();
}

UPoly UPoly::derivative() const {
    std::vector<GaussRat> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * GaussRat(static_cast<long>(k)));
    return UPoly(std::move(d));
}

GaussRat UPoly::eval(const GaussRat& z) const {
    GaussRat acc;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
    return acc;
}

UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<GaussRat> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] + b[k];
    return UPoly(std::move(r));
}

UPoly operator-(const UPoly& a, const UPoly& b) {
    std::vector<GaussRat> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] - b[k];
    return UPoly(std::move(r));
}

UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<GaussRat> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(r));
}

UPoly operator*(const UPoly& a, const GaussRat& s) {
    std::vector<GaussRat> r = a.c_;
    for (auto& x : r) x *= s;
    return UPoly(std::move(r));
}

std::pair<UPoly, UPoly> UPoly::divmod(const UPoly& b) const {
    if (b.is_zero()) throw std::domain_error("UPoly: division by zero");
    if (degree() < b.degree()) return {UPoly(), *this};
    std::vector<GaussRat> rem = c_;
    std::vector<GaussRat> q(c_.size() - b.c_.size() + 1);
    GaussRat inv = b.lead().inverse();
    const std::size_t bd = b.c_.size() - 1;
    for (std::size_t k = q.size(); k-- > 0;) {
        const GaussRat& top = rem[k + bd];
        if (top.is_zero()) continue;
        GaussRat f = top * inv;
        for (std::size_t j = 0; j <= bd; ++j)
            if (!b.c_[j].is_zero()) rem[k + j] -= f * b.c_[j];
        q[k] = std::move(f);
    }
    rem.resize(bd);
    return {UPoly(std::move(q)), UPoly(std::move(rem))};
}

UPoly UPoly::exact_div(const UPoly& b) const {
    auto [q, r] = divmod(b);
    if (!r.is_zero()) throw InexactDivision("UPoly: inexact division");
    return q;
}

UPoly UPoly::pow(unsigned e) const {
    UPoly result(GaussRat(1)), base = *this;
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

UPoly gcd(UPoly a, UPoly b) {
    a = a.monic();
    b = b.monic();
    while (!b.is_zero()) {
        UPoly r = a.divmod(b).second.monic();
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

std::vector<std::pair<UPoly, int>> squarefree(const UPoly& p) {
    // Yun's algorithm (characteristic zero).
    std::vector<std::pair<UPoly, int>> out;
    if (p.degree() < 1) return out;
    UPoly f = p.monic();
    UPoly fp = f.derivative();
    UPoly a = gcd(f, fp);
    UPoly b = f.exact_div(a);
    UPoly c = fp.exact_div(a);
    UPoly dd = c - b.derivative();
    int i = 1;
    while (b.degree() >= 1) {
        UPoly g = gcd(b, dd);
        if (g.degree() >= 1) out.push_back({g, i});
        b = b.exact_div(g);
        c = dd.exact_div(g);
        dd = c - b.derivative();
        ++i;
    }
    return out;
}

int root_order(const UPoly& p, const GaussRat& r) {
    if (p.is_zero()) throw std::domain_error("root_order of zero polynomial");
    int k = 0;
    UPoly q = p;
    UPoly lin = UPoly::linear_root(r);
    while (q.degree() >= 1) {
        auto [quot, rem] = q.divmod(lin);
        if (!rem.is_zero()) break;
        q = std::move(quot);
        ++k;
    }
    return k;
}

namespace {

using cplx = std::complex<long double>;

Rational best_rational(long double x, long maxden) {
    // Continued-fraction convergents of x with denominator bound.
    long double v = x;
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    for (int it = 0; it < 64; ++it) {
        long double a = std::floor(v);
        if (std::fabs(a) > 1e15L) break;
        Integer ai = static_cast<long>(a);
        Integer h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > maxden) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        long double frac = v - a;
        if (std::fabs(frac) < 1e-12L) break;
        v = 1.0L / frac;
    }
    if (k1 == 0) return Rational(0);
    Rational q(h1, k1);
    q.canonicalize();
    return q;
}

std::vector<cplx> aberth_roots(const std::vector<cplx>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<cplx> z(n);
    long double bound = 0;
    for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k] / c[n]));
    long double radius = 1 + bound;
    for (int k = 0; k < n; ++k) {
        long double ang = 2.0L * 3.14159265358979323846L * (k + 0.25L) / n + 0.4L;
        z[k] = std::polar(radius * 0.5L, ang);
    }
    auto eval = [&](const cplx& x, cplx& d) {
        cplx p = c[n];
        d = 0;
        for (int k = n - 1; k >= 0; --k) {
            d = d * x + p;
            p = p * x + c[k];
        }
        return p;
    };
    for (int iter = 0; iter < 500; ++iter) {
        long double maxstep = 0;
        for (int i = 0; i < n; ++i) {
            cplx d;
            cplx p = eval(z[i], d);
            if (std::abs(p) == 0) continue;
            cplx ratio = p / d;
            cplx sum = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) sum += 1.0L / (z[i] - z[j]);
            cplx step = ratio / (1.0L - ratio * sum);
            z[i] -= step;
            maxstep = std::max(maxstep, std::abs(step) / (1 + std::abs(z[i])));
        }
        if (maxstep < 1e-17L) break;
    }
    return z;
}

cplx to_cplx(const GaussRat& g) { return {g.re().get_d(), g.im().get_d()}; }

}  // namespace

std::vector<GaussRat> gaussian_roots(const UPoly& p) {
    std::vector<GaussRat> out;
    if (p.degree() < 1) return out;
    // Work on the square-free part so roots are simple.
    UPoly rest = p.exact_div(gcd(p, p.derivative())).monic();
    // Exact root at 0 first.
    if (rest[0].is_zero()) {
        out.push_back(GaussRat());
        rest = rest.exact_div(UPoly::linear_root(GaussRat()));
    }
    while (rest.degree() >= 1) {
        if (rest.degree() == 1) {
            out.push_back(-rest[0] / rest[1]);
            break;
        }
        std::vector<cplx> c;
        for (const auto& g : rest.coeffs()) c.push_back(to_cplx(g));
        auto approx = aberth_roots(c);
        bool found = false;
        for (const auto& r : approx) {
            for (long maxden : {1L, 1000L, 1000000L}) {
                GaussRat cand(best_rational(r.real(), maxden), best_rational(r.imag(), maxden));
                if (rest.eval(cand).is_zero()) {
                    out.push_back(cand);
                    rest = rest.exact_div(UPoly::linear_root(cand));
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- HomogPoly helpers

UPoly dehomogenize(const Poly& p) { return UPoly(p.c); }

Poly homogenize(const UPoly& u, int deg) {
    if (u.degree() > deg) throw std::invalid_argument("homogenize: degree too small");
    Poly r = Poly::zero(deg);
    for (int k = 0; k <= u.degree(); ++k) r.c[k] = u[k];
    return r;
}

Poly linear_form(const PPoint& z) {
    if (z.inf) return Poly({GaussRat(1), GaussRat(0)});
    return Poly({-z.z, GaussRat(1)});
}

int point_order(const Poly& p, const PPoint& z) {
    if (p.is_zero()) throw std::domain_error("point_order of zero polynomial");
    if (z.inf) {
        int k = 0;
        for (int j = p.degree(); j >= 0 && p.c[j].is_zero(); --j) ++k;
        return k;
    }
    return root_order(dehomogenize(p), z.z);
}

Poly exact_div(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("exact_div by zero");
    int deg = a.degree() - b.degree();
    if (deg < 0) throw InexactDivision("exact_div: degree");
    if (a.is_zero()) return Poly::zero(deg);
    // Peel powers of Y (zero top coefficients) then divide dehomogenized parts.
    UPoly ua = dehomogenize(a), ub = dehomogenize(b);
    int ya = a.degree() - ua.degree(), yb = b.degree() - ub.degree();
    if (ya < yb) throw InexactDivision("exact_div: Y power");
    UPoly q = ua.exact_div(ub);
    return homogenize(q, deg);
}

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return Poly::zero(0);
    UPoly ua = dehomogenize(a), ub = dehomogenize(b);
    const int big = 1 << 30;
    int ya = a.is_zero() ? big : a.degree() - ua.degree();
    int yb = b.is_zero() ? big : b.degree() - ub.degree();
    UPoly g = gcd(ua, ub);
    return homogenize(g, g.degree() + std::min(ya, yb));
}

TPolyH lift(const Poly& p) {
    std::vector<TPoly> c;
    c.reserve(p.c.size());
    for (const auto& x : p.c) c.emplace_back(x);
    return TPolyH(std::move(c));
}

std::string poly_to_string(const Poly& p) {
    std::string out;
    const int d = p.degree();
    for (int j = d; j >= 0; --j) {
        if (p.c[j].is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + p.c[j].to_string() + ")";
        if (j) out += "*X" + (j > 1 ? "^" + std::to_string(j) : std::string());
        if (d - j) out += "*Y" + (d - j > 1 ? "^" + std::to_string(d - j) : std::string());
    }
    return out.empty() ? "0" : out;
}

}  // namespace degmap
