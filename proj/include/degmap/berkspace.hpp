#pragma once

#include "degmap/projmap.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degmap {

struct ConstantLeadingForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroPair : std::domain_error {
    using std::domain_error::domain_error;
};
struct SurplusIdentityViolated : std::logic_error {
    using std::logic_error::logic_error;
};

/// xi_{center, |t|^alpha}; center keeps only terms of exponent < alpha.
class TypeIIPoint {
public:
    TypeIIPoint() = default;
    TypeIIPoint(const TPoly& center, const Rational& alpha);
    static TypeIIPoint gauss() { return {}; }
    /// chi_a = xi_{0, |t|^{-a}}
    static TypeIIPoint chi(const Rational& a) { return {TPoly(), Rational(-a)}; }

    const TPoly& center() const { return center_; }
    const Rational& alpha() const { return alpha_; }
    friend bool operator==(const TypeIIPoint& a, const TypeIIPoint& b) {
        return a.alpha_ == b.alpha_ && a.center_ == b.center_;
    }
    friend bool operator!=(const TypeIIPoint& a, const TypeIIPoint& b) { return !(a == b); }
    /// Disk of this point contains the disk of other.
    bool contains(const TypeIIPoint& other) const;
    std::string to_string() const;

private:
    TPoly center_;
    Rational alpha_ = 0;
};

/// Smallest type II point whose disk contains both disks.
TypeIIPoint join(const TypeIIPoint& a, const TypeIIPoint& b);

/// A tangent direction: Out (towards infinity) or Res(c).
struct Direction {
    bool out = false;
    GaussRat c;
    static Direction outward() { return {true, GaussRat()}; }
    static Direction res(const GaussRat& c) { return {false, c}; }
    /// Identification T_xi P^1 = P^1 with Out = infinity.
    PPoint as_point() const { return out ? PPoint::infinity() : PPoint::at(c); }
    static Direction from_point(const PPoint& p) { return p.inf ? outward() : res(p.z); }
    friend bool operator==(const Direction& a, const Direction& b) { return a.out == b.out && (a.out || a.c == b.c); }
    friend bool operator!=(const Direction& a, const Direction& b) { return !(a == b); }
    std::string to_string() const { return out ? "out" : c.to_string(); }
};

/// unit * prod (z - a_i)^{m_i} / prod (z - b_j)^{n_j}.
struct FactoredRat {
    TPoly unit = TPoly(1);
    std::vector<std::pair<TPoly, int>> zeros;
    std::vector<std::pair<TPoly, int>> poles;

    int degree() const;
    /// Homogeneous pair of degree max(sum zeros, sum poles).
    TMap expand() const;
    FactoredRat operator*(const FactoredRat& o) const;
    /// (1 + t^N/(z - p)) = (z - p + t^N)/(z - p)
    static FactoredRat pole_bump(const TPoly& p, const Rational& N);
    static FactoredRat from_map(const Map& f);
};

struct TangentData {
    TypeIIPoint image;
    Map tangent;  // induced map on residues, Out = infinity
    int local_degree = 0;
    /// Reduction of the pair at xi after subtracting the image center; its gcd carries the surplus.
    Map leading_pair;
    int degree = 0;
};

Direction direction_of(const TypeIIPoint& xi, const TPoly& p);
Direction direction_of_infinity();
/// Direction at xi containing the type II point zeta (zeta != xi).
Direction direction_of(const TypeIIPoint& xi, const TypeIIPoint& zeta);

/// Leading form of a homogeneous polynomial at xi: P(center + c t^alpha) = L(c) t^v + higher.
struct LeadingForm {
    Poly form;  // homogeneous in (c, 1) of the same degree as P
    Rational v;
};
LeadingForm leading_form(const TPolyH& P, const TypeIIPoint& xi);

TangentData image_and_tangent(const TMap& phi, const TypeIIPoint& xi);
TangentData image_and_tangent(const FactoredRat& phi, const TypeIIPoint& xi);
Direction tangent_image(const TangentData& td, const Direction& v);
int directional_multiplicity(const TangentData& td, const Direction& v);
int surplus(const TangentData& td, const Direction& v);
int surplus(const TMap& phi, const TypeIIPoint& xi, const Direction& v);
int surplus(const FactoredRat& phi, const TypeIIPoint& xi, const Direction& v);
/// Directions with positive surplus, with their surplus.
std::vector<std::pair<Direction, int>> surplus_directions(const TangentData& td);
/// Eq. deg = local degree + sum of surpluses; throws SurplusIdentityViolated.
void check_surplus_sum(const TangentData& td);

struct SurplusIterate {
    long long surplus = 0;  // s^n(v)
    long long mult = 0;     // m^n(v)
    Rational prop;          // s^n(v)/d^n
    std::vector<TypeIIPoint> orbit;  // xi_0 .. xi_n
    std::vector<Direction> directions;  // v_0 .. v_n
};
SurplusIterate surplus_iterate(const TMap& phi, const TypeIIPoint& xi, const Direction& v, int n);

/// M^{-1} ∘ psi ∘ M reduced coefficientwise and canonicalized.
Map reduce_at(const TMap& psi, const TMap& M);
/// reduce_at(g^n, M) computed as the n-th iterate of M^{-1} ∘ g ∘ M.
Map reduce_iterate_at(const TMap& g, int n, const TMap& M);
/// Coefficient reduction (t -> 0 after normalization).
Map coefficient_reduction(const TMap& psi);
std::pair<Map, Map> gauss_reduction(const TMap& phi);

/// Affine Möbius z -> center + t^alpha z sending the Gauss point to xi.
TMap affine_chart(const TypeIIPoint& xi);
TMap identity_tmap();
TMap tmap_inverse(const TMap& m);

/// Predicted hole depths of the reduction of phi^n at zeta0 (chart affine_chart(zeta0)),
/// for one direction or for all roots of a square-free residue polynomial.
struct DepthPrediction {
    Poly factor;      // square-free: X - cY, Y (Out) or an unsplit cluster
    long long depth = 0;
    long long surplus = 0;
    long long mult = 0;
    bool gauss_side = false;  // zeta0 lies in the image direction
};
long long depths_via_surplus(const TMap& phi, const TypeIIPoint& zeta0, int n, const Direction& v);
std::vector<DepthPrediction> depths_via_surplus(const TMap& phi, const TypeIIPoint& zeta0, int n, const Poly& factor);

/// phi * prod (1 + t^N/(z - p_i)) after verifying images, tangent maps and surplus changes on gamma.
FactoredRat perturb(const FactoredRat& phi, const std::vector<TPoly>& new_poles, const std::vector<TypeIIPoint>& gamma,
                    long N);
/// Doubles N from N0 until perturb verifies, up to n_max.
std::pair<FactoredRat, long> perturb_escalating(const FactoredRat& phi, const std::vector<TPoly>& new_poles,
                                                const std::vector<TypeIIPoint>& gamma, long N0, long n_max = 4096);

/// Test hook: every image_and_tangent call asserts the surplus-sum identity when enabled.
void set_surplus_checks(bool on);
long long surplus_checks_performed();

}  // namespace degmap
