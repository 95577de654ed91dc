#include "degmap/exactnum.hpp"

#include <algorithm>
#include <cctype>

namespace degmap {

Rational make_rat(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("empty rational");
    std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    bool seen_slash = false;
    for (std::size_t k = start; k < s.size(); ++k) {
        if (s[k] == '/') {
            if (seen_slash || k == start || k + 1 == s.size()) throw ParseError("bad rational '" + raw + "'");
            seen_slash = true;
        } else if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
            throw ParseError("bad rational '" + raw + "'");
        }
    }
    if (start == s.size()) throw ParseError("bad rational '" + raw + "'");
    if (s[0] == '+') s = s.substr(1);
    Rational q;
    q.set_str(s, 10);
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + raw + "'");
    q.canonicalize();
    return q;
}

// ---------------------------------------------------------------- GaussRat

GaussRat::GaussRat(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

Rational GaussRat::norm() const { return Rational(re_ * re_ + im_ * im_); }

GaussRat GaussRat::inverse() const {
    if (is_zero()) throw std::domain_error("GaussRat: division by zero");
    Rational n = norm();
    return {Rational(re_ / n), Rational(-im_ / n)};
}

GaussRat& GaussRat::operator+=(const GaussRat& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussRat& GaussRat::operator-=(const GaussRat& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussRat& GaussRat::operator*=(const GaussRat& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussRat& GaussRat::operator/=(const GaussRat& o) {
    if (sgn(o.im_) == 0) {
        if (sgn(o.re_) == 0) throw std::domain_error("GaussRat: division by zero");
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    return *this *= o.inverse();
}

GaussRat GaussRat::pow(unsigned long e) const {
    GaussRat result(1), base = *this;
    while (e) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

std::string GaussRat::to_string() const {
    if (sgn(im_) == 0) return rat_to_string(re_);
    std::string imag = rat_to_string(im_) + "*i";
    if (sgn(re_) == 0) return imag;
    return rat_to_string(re_) + (sgn(im_) > 0 ? "+" : "") + imag;
}

GaussRat GaussRat::parse(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("empty scalar");
    if (s.back() != 'i') return {parse_rational(s), 0};
    s.pop_back();
    if (!s.empty() && s.back() == '*') s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;)
        if (s[k] == '+' || s[k] == '-') {
            split = k;
            break;
        }
    std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
    std::string im_part = split == std::string::npos ? s : s.substr(split);
    Rational im;
    if (im_part.empty() || im_part == "+") im = 1;
    else if (im_part == "-") im = -1;
    else im = parse_rational(im_part);
    return {re_part.empty() ? Rational(0) : parse_rational(re_part), im};
}

// ---------------------------------------------------------------- TPoly

TPoly::TPoly(const GaussRat& c) {
    if (!c.is_zero()) terms_.push_back({Rational(0), c});
}

TPoly TPoly::monomial(const GaussRat& c, const Rational& exp) {
    TPoly p;
    if (!c.is_zero()) p.terms_.push_back({exp, c});
    return p;
}

TPoly TPoly::from_terms(std::vector<Term> terms) {
    TPoly p;
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
}

void TPoly::normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.exp < b.exp; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& tm : terms_) {
        if (!out.empty() && out.back().exp == tm.exp) out.back().coef += tm.coef;
        else out.push_back(std::move(tm));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef.is_zero(); }),
              out.end());
    terms_ = std::move(out);
}

bool TPoly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && sgn(terms_[0].exp) == 0); }

std::optional<Rational> TPoly::val() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.front().exp;
}

GaussRat TPoly::lowest_coef() const { return terms_.empty() ? GaussRat() : terms_.front().coef; }

GaussRat TPoly::coef(const Rational& exp) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                               [](const Term& a, const Rational& e) { return a.exp < e; });
    if (it != terms_.end() && it->exp == exp) return it->coef;
    return GaussRat();
}

GaussRat TPoly::reduce0() const {
    if (!terms_.empty() && sgn(terms_.front().exp) < 0)
        throw NegativeValuation("reduce0: negative valuation " + rat_to_string(terms_.front().exp));
    return coef(Rational(0));
}

TPoly TPoly::truncate_below(const Rational& bound) const {
    TPoly r;
    for (const auto& tm : terms_) {
        if (tm.exp >= bound) break;
        r.terms_.push_back(tm);
    }
    return r;
}

TPoly TPoly::operator-() const {
    TPoly r = *this;
    for (auto& tm : r.terms_) tm.coef = -tm.coef;
    return r;
}

namespace {
template <class Op>
std::vector<TPoly::Term> merge_terms(const std::vector<TPoly::Term>& a, const std::vector<TPoly::Term>& b,
                                     Op combine_b) {
    std::vector<TPoly::Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].exp < b[j].exp)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].exp < a[i].exp) {
            out.push_back({b[j].exp, combine_b(GaussRat(), b[j].coef)});
            ++j;
        } else {
            GaussRat c = combine_b(a[i].coef, b[j].coef);
            if (!c.is_zero()) out.push_back({a[i].exp, std::move(c)});
            ++i;
            ++j;
        }
    }
    return out;
}
}  // namespace

TPoly& TPoly::operator+=(const TPoly& o) {
    terms_ = merge_terms(terms_, o.terms_, [](const GaussRat& x, const GaussRat& y) { return x + y; });
    return *this;
}

TPoly& TPoly::operator-=(const TPoly& o) {
    terms_ = merge_terms(terms_, o.terms_, [](const GaussRat& x, const GaussRat& y) { return x - y; });
    return *this;
}

TPoly operator*(const TPoly& a, const TPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (b.terms_.size() == 1 && sgn(b.terms_[0].exp) == 0) return a * b.terms_[0].coef;
    if (a.terms_.size() == 1 && sgn(a.terms_[0].exp) == 0) return b * a.terms_[0].coef;
    std::vector<TPoly::Term> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) prod.push_back({Rational(x.exp + y.exp), x.coef * y.coef});
    return TPoly::from_terms(std::move(prod));
}

TPoly& TPoly::operator*=(const TPoly& o) {
    *this = *this * o;
    return *this;
}

TPoly& TPoly::operator*=(const GaussRat& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    if (c.is_one()) return *this;
    for (auto& tm : terms_) tm.coef *= c;
    return *this;
}

bool operator==(const TPoly& a, const TPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k)
        if (a.terms_[k].exp != b.terms_[k].exp || a.terms_[k].coef != b.terms_[k].coef) return false;
    return true;
}

TPoly TPoly::shift(const Rational& q) const {
    TPoly r = *this;
    for (auto& tm : r.terms_) tm.exp += q;
    return r;
}

TPoly TPoly::pow(unsigned long e) const {
    TPoly result(1), base = *this;
    while (e) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

TPoly TPoly::exact_div(const TPoly& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("TPoly: division by zero");
    if (divisor.terms_.size() == 1) {
        TPoly r = shift(Rational(-divisor.terms_[0].exp));
        return r * divisor.terms_[0].coef.inverse();
    }
    // Long division from the lowest term; the quotient span is bounded by the spans of the operands.
    const Rational& dlow = divisor.terms_.front().exp;
    GaussRat dinv = divisor.terms_.front().coef.inverse();
    TPoly rem = *this;
    std::vector<Term> quot;
    if (rem.is_zero()) return {};
    Rational qmax = terms_.back().exp - divisor.terms_.back().exp;
    while (!rem.is_zero()) {
        Rational e = rem.terms_.front().exp - dlow;
        if (e > qmax) throw InexactDivision("TPoly: divisor does not divide exactly");
        GaussRat c = rem.terms_.front().coef * dinv;
        quot.push_back({e, c});
        rem -= divisor.shift(e) * c;
    }
    return from_terms(std::move(quot));
}

TPoly TPoly::rescale_exponents(long e) const {
    if (e < 1) throw std::invalid_argument("rescale_exponents: e must be >= 1");
    TPoly r = *this;
    for (auto& tm : r.terms_) tm.exp *= e;
    return r;
}

GaussRat TPoly::eval_integer_exponents(const GaussRat& value) const {
    GaussRat acc;
    for (const auto& tm : terms_) {
        if (tm.exp.get_den() != 1) throw std::domain_error("eval: fractional exponent");
        long e = tm.exp.get_num().get_si();
        GaussRat p = e >= 0 ? value.pow(e) : value.inverse().pow(-e);
        acc += tm.coef * p;
    }
    return acc;
}

Integer TPoly::exponent_denominator() const {
    Integer l = 1;
    for (const auto& tm : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), tm.exp.get_den_mpz_t());
    return l;
}

std::string TPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& tm : terms_) {
        if (!out.empty()) out += " + ";
        out += "(" + tm.coef.to_string() + ")";
        if (sgn(tm.exp) != 0) out += "*t^(" + rat_to_string(tm.exp) + ")";
    }
    return out;
}

TPoly tp_mul(const TPoly& x, const TPoly& y) { return x * y; }
std::optional<Rational> val(const TPoly& x) { return x.val(); }
GaussRat reduce0(const TPoly& x) { return x.reduce0(); }
TPoly rescale_exponents(const TPoly& x, long e) { return x.rescale_exponents(e); }

}  // namespace degmap
