#pragma once

#include "degmap/poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degmap {

using Depth = long long;

struct DegreeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InIndeterminacy : std::domain_error {
    using std::domain_error::domain_error;
};
struct NotUnstable : std::domain_error {
    using std::domain_error::domain_error;
};
struct NonUniqueBadHole : std::logic_error {
    using std::logic_error::logic_error;
};
struct UnsplitFactor : std::domain_error {
    using std::domain_error::domain_error;
};
struct NotStable : std::domain_error {
    using std::domain_error::domain_error;
};
struct TooFewSplitHoles : std::domain_error {
    using std::domain_error::domain_error;
};

/// Pair [P:Q] of homogeneous polynomials of equal degree.
template <class S>
struct MapPoint {
    HomogPoly<S> p, q;

    int degree() const { return p.degree(); }
    friend bool operator==(const MapPoint& a, const MapPoint& b) { return a.p == b.p && a.q == b.q; }
    friend bool operator!=(const MapPoint& a, const MapPoint& b) { return !(a == b); }

    /// Literal composition this∘g (no gcd removal).
    MapPoint compose(const MapPoint& g) const {
        auto Ap = HomogPoly<S>::powers(g.p, degree());
        auto Bp = HomogPoly<S>::powers(g.q, degree());
        return {p.compose_with_powers(Ap, Bp), q.compose_with_powers(Ap, Bp)};
    }
};

using Map = MapPoint<GaussRat>;
using TMap = MapPoint<TPoly>;

/// Canonical projective representative: Z[i] coefficients, unit content, first nonzero
/// coefficient (P first, low X-power first) with positive real part (or zero real part and
/// positive imaginary part).
Map canonical(const Map& f);
Map make_map(const Poly& p, const Poly& q);
/// z -> (a z + b) / (c z + d)
Map mobius(const GaussRat& a, const GaussRat& b, const GaussRat& c, const GaussRat& d);
/// Inverse of a degree-1 map (adjugate).
Map mobius_inverse(const Map& m);
/// The Möbius map sending z1, z2, z3 to 0, 1, infinity.
Map mobius_to_01inf(const PPoint& z1, const PPoint& z2, const PPoint& z3);
/// M^{-1} ∘ f ∘ M, canonicalized.
Map conjugate(const Map& f, const Map& m);
TMap lift(const Map& f);
/// Image of a point under a map with coprime coordinates at z.
PPoint apply(const Map& f, const PPoint& z);
std::string map_to_string(const Map& f);

struct HoleEntry {
    bool split = true;
    PPoint point;  // valid when split
    Poly factor;   // square-free; X - zY or Y when split
    Depth depth = 0;
    int cluster_degree() const { return factor.degree(); }
};

struct Decomposition {
    int d = 0;
    Poly h;       // H_f
    Map induced;  // canonical f̂
    std::vector<HoleEntry> holes;
    int induced_degree() const { return induced.degree(); }
};

/// Square-free hole multiplicity groups (pairwise coprime factors); used for f and f^n.
struct HoleGroup {
    Poly factor;
    Depth mult = 0;
};

GaussRat resultant(const Poly& p, const Poly& q);
Decomposition decompose(const Map& f);
Depth depth(const Map& f, const PPoint& z);
/// Local degree of a non-degenerate map at z.
int local_multiplicity(const Map& g, const PPoint& z);
bool is_in_Id(const Map& f);
bool is_in_Id(const Decomposition& D);
bool is_semistable(const Map& f);
bool is_stable(const Map& f);
/// Verdict on hole groups for a map of total degree D with induced map g.
bool semistable_from_groups(const std::vector<HoleGroup>& groups, const Map& induced, Depth D);
bool stable_from_groups(const std::vector<HoleGroup>& groups, const Map& induced, Depth D);
std::vector<HoleGroup> hole_groups(const Decomposition& D);
Rational mu_minus(Depth d);
Rational mu_plus(Depth d);

Map iterate_compose(const Map& f, int n, long budget = 2000);

struct FactoredIterate {
    /// (H_f ∘ f̂^k, d^(n-k-1)) for k = 0..n-1
    std::vector<std::pair<Poly, Depth>> hole_factors;
    Map induced;  // f̂^n
    Depth degree = 0;
    /// Coprime square-free refinement of the product.
    std::vector<HoleGroup> groups() const;
    /// Expanded hole polynomial (may be large).
    Poly hole_poly() const;
};

FactoredIterate iterate_factored(const Map& f, int n);
Depth depth_iterate(const Map& f, const PPoint& z, int n);
/// Proportional depth d_z(f^n)/d^n.
Rational prop_depth_iterate(const Map& f, const PPoint& z, int n);
bool is_semistable_iterate(const Map& f, int n);
bool is_n_unstable(const Map& f, int n);
PPoint bad_hole(const Map& f, int n);

enum class CaseKind { NotUnstable, Case0, Case1, Case2, Case3, Case4, Case5, ConstantInduced };
std::string case_name(CaseKind k);

struct CaseTag {
    CaseKind kind = CaseKind::NotUnstable;
    PPoint bad_hole;
    Depth bad_depth = 0;
    /// h_0, h_1, ... (distinct points of the forward orbit, truncated at n entries)
    std::vector<PPoint> orbit;
    /// m_{h_j}(f̂) for the listed orbit points
    std::vector<int> multiplicities;
    /// Index where the orbit re-enters itself (orbit[k] maps to orbit[cycle_start]); -1 if not closed.
    int cycle_start = -1;
    /// Case 4/5: Möbius N with N(infinity) = bad hole (and N(0) = partner in Case 5);
    /// N^{-1} ∘ f̂ ∘ N is a polynomial (Case 4) or c z^{-(d-1)} (Case 5).
    std::optional<Map> normalizer;
};

CaseTag classify_case(const Map& f, int n);

/// Conjugacy test for stable maps.
bool git_equal_stable(const Map& g, const Map& h);

/// Depth multiset + induced degree; distinguishes stable classes, and semistable classes
/// only when the hole configuration is fixed by the argument at hand.
struct Fingerprint {
    std::vector<std::pair<Depth, int>> depths;  // (depth, cluster degree), sorted
    int induced_degree = 0;
    friend bool operator==(const Fingerprint& a, const Fingerprint& b) {
        return a.depths == b.depths && a.induced_degree == b.induced_degree;
    }
};
Fingerprint fingerprint(const Map& f);

}  // namespace degmap
