#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace degmap {

using Rational = mpq_class;
using Integer = mpz_class;

struct NegativeValuation : std::domain_error {
    using std::domain_error::domain_error;
};
struct InexactDivision : std::domain_error {
    using std::domain_error::domain_error;
};
struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

Rational make_rat(long num, long den = 1);
std::string rat_to_string(const Rational& q);
Rational parse_rational(const std::string& s);

/// a + b i with a, b rational.
class GaussRat {
public:
    GaussRat() = default;
    GaussRat(long re) : re_(re) {}
    GaussRat(Rational re, Rational im = 0);

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

    GaussRat conj() const { return {re_, -im_}; }
    /// a^2 + b^2
    Rational norm() const;
    GaussRat inverse() const;

    GaussRat operator-() const { return {-re_, -im_}; }
    GaussRat& operator+=(const GaussRat& o);
    GaussRat& operator-=(const GaussRat& o);
    GaussRat& operator*=(const GaussRat& o);
    GaussRat& operator/=(const GaussRat& o);

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
    friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

    /// Total order (re, then im); only for containers and deterministic output.
    friend bool operator<(const GaussRat& a, const GaussRat& b) {
        int c = cmp(a.re_, b.re_);
        return c != 0 ? c < 0 : a.im_ < b.im_;
    }

    GaussRat pow(unsigned long e) const;
    std::string to_string() const;
    static GaussRat parse(const std::string& s);
    static GaussRat i() { return {0, 1}; }

private:
    Rational re_ = 0;
    Rational im_ = 0;
};

/// Finite sum of c_q t^q, q rational. Terms sorted by exponent, coefficients nonzero.
class TPoly {
public:
    struct Term {
        Rational exp;
        GaussRat coef;
    };

    TPoly() = default;
    TPoly(long c) : TPoly(GaussRat(c)) {}
    TPoly(const GaussRat& c);
    TPoly(const Rational& c) : TPoly(GaussRat(c)) {}
    static TPoly monomial(const GaussRat& c, const Rational& exp);
    static TPoly t(const Rational& exp = 1) { return monomial(GaussRat(1), exp); }
    /// Terms may be unsorted, repeated or zero.
    static TPoly from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::size_t size() const { return terms_.size(); }

    /// Minimum exponent; nullopt encodes +infinity.
    std::optional<Rational> val() const;
    /// Coefficient at the minimum exponent (zero for the zero element).
    GaussRat lowest_coef() const;
    GaussRat coef(const Rational& exp) const;
    /// t^0 coefficient; requires val >= 0.
    GaussRat reduce0() const;
    /// Keep terms with exponent < bound.
    TPoly truncate_below(const Rational& bound) const;

    TPoly operator-() const;
    TPoly& operator+=(const TPoly& o);
    TPoly& operator-=(const TPoly& o);
    TPoly& operator*=(const TPoly& o);
    TPoly& operator*=(const GaussRat& c);
    friend TPoly operator+(TPoly a, const TPoly& b) { return a += b; }
    friend TPoly operator-(TPoly a, const TPoly& b) { return a -= b; }
    friend TPoly operator*(const TPoly& a, const TPoly& b);
    friend TPoly operator*(TPoly a, const GaussRat& c) { return a *= c; }
    friend TPoly operator*(const GaussRat& c, TPoly a) { return a *= c; }
    friend bool operator==(const TPoly& a, const TPoly& b);
    friend bool operator!=(const TPoly& a, const TPoly& b) { return !(a == b); }

    /// Multiply by t^q.
    TPoly shift(const Rational& q) const;
    TPoly pow(unsigned long e) const;
    /// Exact quotient; throws InexactDivision when the divisor does not divide.
    TPoly exact_div(const TPoly& divisor) const;
    /// Exponent q becomes q*e.
    TPoly rescale_exponents(long e) const;
    /// Substitute t -> value (exponents must be integers).
    GaussRat eval_integer_exponents(const GaussRat& value) const;
    /// lcm of exponent denominators.
    Integer exponent_denominator() const;

    std::string to_string() const;

private:
    std::vector<Term> terms_;
    void normalize();
};

TPoly tp_mul(const TPoly& x, const TPoly& y);
std::optional<Rational> val(const TPoly& x);
GaussRat reduce0(const TPoly& x);
TPoly rescale_exponents(const TPoly& x, long e);

}  // namespace degmap
