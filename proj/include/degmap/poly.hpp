#pragma once

#include "degmap/exactnum.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degmap {

/// Point of P^1 over Q(i): either z or infinity = [1:0].
struct PPoint {
    bool inf = false;
    GaussRat z;

    static PPoint at(const GaussRat& z) { return {false, z}; }
    static PPoint infinity() { return {true, GaussRat()}; }
    /// Homogeneous coordinates [x:y].
    GaussRat x() const { return inf ? GaussRat(1) : z; }
    GaussRat y() const { return inf ? GaussRat(0) : GaussRat(1); }
    static PPoint from_xy(const GaussRat& x, const GaussRat& y);

    std::string to_string() const { return inf ? "inf" : z.to_string(); }
    static PPoint parse(const std::string& s);

    friend bool operator==(const PPoint& a, const PPoint& b) {
        return a.inf == b.inf && (a.inf || a.z == b.z);
    }
    friend bool operator!=(const PPoint& a, const PPoint& b) { return !(a == b); }
    /// Finite points by (re, im); infinity last.
    friend bool operator<(const PPoint& a, const PPoint& b) {
        if (a.inf != b.inf) return b.inf;
        return !a.inf && a.z < b.z;
    }
};

/// Dense univariate polynomial over Q(i), coefficient k multiplies z^k; no trailing zeros.
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<GaussRat> c);
    UPoly(const GaussRat& c) : UPoly(std::vector<GaussRat>{c}) {}
    static UPoly linear_root(const GaussRat& r) { return UPoly({-r, GaussRat(1)}); }

    const std::vector<GaussRat>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    /// -1 for zero.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const GaussRat& lead() const { return c_.back(); }
    GaussRat operator[](std::size_t k) const { return k < c_.size() ? c_[k] : GaussRat(); }

    UPoly monic() const;
    UPoly derivative() const;
    GaussRat eval(const GaussRat& z) const;

    friend UPoly operator+(const UPoly& a, const UPoly& b);
    friend UPoly operator-(const UPoly& a, const UPoly& b);
    friend UPoly operator*(const UPoly& a, const UPoly& b);
    friend UPoly operator*(const UPoly& a, const GaussRat& s);
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

    /// Quotient and remainder.
    std::pair<UPoly, UPoly> divmod(const UPoly& b) const;
    UPoly exact_div(const UPoly& b) const;
    UPoly pow(unsigned e) const;

private:
    std::vector<GaussRat> c_;
    void trim();
};

/// Monic gcd; gcd(0,0) = 0.
UPoly gcd(UPoly a, UPoly b);
/// Square-free decomposition: (factor, multiplicity) with pairwise coprime monic factors.
std::vector<std::pair<UPoly, int>> squarefree(const UPoly& p);
/// Roots of p lying in Q(i), found numerically and confirmed exactly; sorted.
std::vector<GaussRat> gaussian_roots(const UPoly& p);
/// Multiplicity of r as a root of p (p nonzero).
int root_order(const UPoly& p, const GaussRat& r);

/// Homogeneous polynomial: c[j] multiplies X^j Y^(deg - j).
template <class S>
struct HomogPoly {
    std::vector<S> c;

    HomogPoly() : c{S()} {}
    explicit HomogPoly(std::vector<S> coeffs) : c(std::move(coeffs)) {
        if (c.empty()) c.push_back(S());
    }
    static HomogPoly zero(int deg) { return HomogPoly(std::vector<S>(deg + 1)); }
    static HomogPoly constant(const S& s) { return HomogPoly(std::vector<S>{s}); }
    /// X^a Y^b
    static HomogPoly monomial(int a, int b, const S& s = S(1)) {
        HomogPoly p = zero(a + b);
        p.c[a] = s;
        return p;
    }

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const {
        for (const auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }

    friend HomogPoly operator*(const HomogPoly& a, const HomogPoly& b) {
        HomogPoly r = zero(a.degree() + b.degree());
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c.size(); ++j) {
                if (b.c[j].is_zero()) continue;
                r.c[i + j] += a.c[i] * b.c[j];
            }
        }
        return r;
    }
    friend HomogPoly operator+(HomogPoly a, const HomogPoly& b) {
        if (a.degree() != b.degree()) throw std::invalid_argument("HomogPoly: degree mismatch in +");
        for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
        return a;
    }
    friend HomogPoly operator-(HomogPoly a, const HomogPoly& b) {
        if (a.degree() != b.degree()) throw std::invalid_argument("HomogPoly: degree mismatch in -");
        for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
        return a;
    }
    HomogPoly scaled(const S& s) const {
        HomogPoly r = *this;
        for (auto& x : r.c) x = x * s;
        return r;
    }
    friend bool operator==(const HomogPoly& a, const HomogPoly& b) { return a.c == b.c; }
    friend bool operator!=(const HomogPoly& a, const HomogPoly& b) { return !(a == b); }

    HomogPoly pow(unsigned e) const {
        HomogPoly result = constant(S(1)), base = *this;
        while (e) {
            if (e & 1) result = result * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return result;
    }

    /// P(A, B) for A, B homogeneous of equal degree.
    HomogPoly compose(const HomogPoly& A, const HomogPoly& B) const {
        return compose_with_powers(powers(A, degree()), powers(B, degree()));
    }

    static std::vector<HomogPoly> powers(const HomogPoly& A, int n) {
        std::vector<HomogPoly> out;
        out.reserve(n + 1);
        out.push_back(constant(S(1)));
        for (int k = 1; k <= n; ++k) out.push_back(out.back() * A);
        return out;
    }

    HomogPoly compose_with_powers(const std::vector<HomogPoly>& Ap, const std::vector<HomogPoly>& Bp) const {
        const int d = degree();
        const int e = Ap.size() > 1 ? Ap[1].degree() : (Bp.size() > 1 ? Bp[1].degree() : 0);
        HomogPoly r = zero(d * e);
        for (int j = 0; j <= d; ++j) {
            if (c[j].is_zero()) continue;
            HomogPoly term = Ap[j] * Bp[d - j];
            for (std::size_t k = 0; k < term.c.size(); ++k)
                if (!term.c[k].is_zero()) r.c[k] += c[j] * term.c[k];
        }
        return r;
    }

    /// Evaluate at [x:y].
    S eval(const S& x, const S& y) const {
        S acc, xp(1);
        std::vector<S> yp(c.size(), S(1));
        for (std::size_t k = 1; k < c.size(); ++k) yp[k] = yp[k - 1] * y;
        const int d = degree();
        for (int j = 0; j <= d; ++j) {
            if (!c[j].is_zero()) acc += c[j] * xp * yp[d - j];
            xp = xp * x;
        }
        return acc;
    }
};

using Poly = HomogPoly<GaussRat>;
using TPolyH = HomogPoly<TPoly>;

/// p(z) = P(z, 1).
UPoly dehomogenize(const Poly& p);
/// Y^(deg - deg u) * u(X/Y) homogenized to degree deg.
Poly homogenize(const UPoly& u, int deg);
/// Order of vanishing of P at the point z.
int point_order(const Poly& p, const PPoint& z);
/// Homogeneous linear form vanishing at z: X - zY, or Y at infinity.
Poly linear_form(const PPoint& z);
/// Exact division of homogeneous polynomials; throws InexactDivision.
Poly exact_div(const Poly& a, const Poly& b);
/// gcd, scaled so the dehomogenized part is monic; zero only if both are zero.
Poly gcd(const Poly& a, const Poly& b);
/// Lift to TPoly coefficients.
TPolyH lift(const Poly& p);
std::string poly_to_string(const Poly& p);

}  // namespace degmap
