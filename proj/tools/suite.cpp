#include "suite.hpp"

#include "degmap/catalog.hpp"
#include "degmap/witness.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <tuple>
#include <functional>
#include <sstream>

namespace degmap::suite {

namespace {

using testsupport::iterate;

/// Counts checks and keeps the first few violations for the report line.
struct Tally {
    long checks = 0, violations = 0;
    std::vector<std::string> notes;
    void check(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        ++violations;
        if (notes.size() < 3) notes.push_back(what);
    }
    /// Runs body, turning an escaping exception into a violation.
    void guard(const std::string& what, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            check(false, what + ": " + e.what());
        }
    }
};

const Map& cat(const std::string& name) { return catalog_entry(name).map; }

Map x3y() { return map_from_ints({0, 0, 0, 1, 0}, {1, 0, 0, 0, 0}); }  // [X^3Y : Y^4], d = 4

std::map<std::string, Depth> depth_table(const Map& f) {
    std::map<std::string, Depth> t;
    for (const auto& h : decompose(f).holes) t[h.split ? h.point.to_string() : poly_to_string(h.factor)] = h.depth;
    return t;
}

std::size_t family_index(const Certificate& c, const std::string& label) {
    for (std::size_t i = 0; i < c.families.size(); ++i)
        if (c.families[i].label == label) return i;
    throw std::runtime_error("no family " + label);
}

const LimitRecord& limit_of(const Certificate& c, std::size_t fam, int sample = 0) {
    for (const auto& r : c.limits)
        if (r.family == static_cast<int>(fam) && r.sample == sample) return r;
    throw std::runtime_error("no limit record");
}

Map oracle_limit(const FamilySpec& fam, int sample, int n) {
    return reduce_at(iterate(fam.maps[static_cast<std::size_t>(sample)], n), fam.conjugator);
}

long count_passed(const VerificationReport& r, const std::string& needle) {
    long k = 0;
    for (const auto& p : r.passed)
        if (p.find(needle) != std::string::npos) ++k;
    return k;
}

void verify_into(Tally& t, const Certificate& c, const std::string& what) {
    VerificationReport rep = verify_certificate(c);
    t.check(rep.valid, what + " valid" + (rep.failures.empty() ? "" : " (" + rep.failures.front() + ")"));
}

// ---------------------------------------------------------------- criteria

void depth_oracle(Tally& t, unsigned seed) {
    std::vector<Map> maps;
    for (const auto& e : catalog())
        if (!e.in_Id) maps.push_back(e.map);  // iterates of I(d) members are undefined
    std::mt19937 rng(seed);
    for (int i = 0; i < 100; ++i) maps.push_back(testsupport::planted_map(rng, 2 + i % 3));
    for (const auto& f : maps)
        for (int n = 2; n <= 3; ++n) {
            const Map fn = iterate_compose(f, n);
            const Decomposition Dn = decompose(fn);
            for (const auto& h : Dn.holes)
                if (h.split) t.check(depth_iterate(f, h.point, n) == h.depth, "depth at " + h.point.to_string() + " of " + map_to_string(f));
            for (const auto& h : decompose(f).holes)
                if (h.split) t.check(depth_iterate(f, h.point, n) == depth(fn, h.point), "hole of f " + map_to_string(f));
            const Poly hp = iterate_factored(f, n).hole_poly();
            t.check(hp.degree() == Dn.h.degree() && gcd(hp, Dn.h).degree() == hp.degree(),
                    "hole polynomial of " + map_to_string(f));
        }
}

void catalog_verdicts(Tally& t) {
    for (const auto& e : catalog()) {
        const Map& f = e.map;
        t.check(is_semistable(f) == e.semistable, e.name + " semistable");
        t.check(is_stable(f) == e.stable, e.name + " stable");
        t.check(is_in_Id(f) == e.in_Id, e.name + " in I(d)");
        for (const auto& x : e.expectations) {
            const bool fast = is_n_unstable(f, x.n);
            t.check(fast == x.unstable, e.name + " U_" + std::to_string(x.n));
            if (!e.in_Id && e.semistable) {
                // Oracle: the literal iterate fails semistability.
                const bool literal = !is_semistable(iterate_compose(f, x.n));
                t.check(literal == x.unstable, e.name + " literal U_" + std::to_string(x.n));
            }
            if (x.unstable) {
                CaseTag c = classify_case(f, x.n);
                t.check(c.kind == *x.kind, e.name + " case");
                t.check(c.bad_hole == *x.bad_hole, e.name + " bad hole");
            }
        }
    }
    // Spot values named in the criterion.
    t.check(classify_case(cat("G3"), 2).kind == CaseKind::Case4 && bad_hole(cat("G3"), 2) == PPoint::infinity(), "G3");
    t.check(is_in_Id(cat("F3")) && is_semistable(cat("F3")) && !is_stable(cat("F3")), "F3");
    t.check(classify_case(cat("P3"), 2).kind == CaseKind::Case0, "P3 n=2");
    t.check(classify_case(cat("P3"), 3).kind == CaseKind::Case3, "P3 n=3");
    // M3: minimal n is 5, confirmed on the literal iterates.
    for (int n = 2; n <= 5; ++n) {
        const bool un = !is_semistable(iterate_compose(cat("M3"), n));
        t.check(un == (n == 5), "M3 literal U_" + std::to_string(n));
        t.check(is_n_unstable(cat("M3"), n) == (n == 5), "M3 U_" + std::to_string(n));
    }
    t.check(classify_case(cat("M3"), 5).kind == CaseKind::Case5, "M3 case");
}

void cubic_witness(Tally& t) {
    const Certificate c = make_certificate(cat("G3"), 2);
    const std::size_t gi = family_index(c, "g"), pi = family_index(c, "psi");
    const LimitRecord &G = limit_of(c, gi), &F = limit_of(c, pi);
    t.check(oracle_limit(c.families[gi], 0, 2) == G.limit, "g limit equals literal expansion");
    t.check(oracle_limit(c.families[pi], 0, 2) == F.limit, "psi limit equals literal expansion");
    t.check(depth_table(G.limit) == std::map<std::string, Depth>{{"0", 4}, {"1", 1}, {"inf", 4}}, "g depth table");
    t.check(depth_table(F.limit) == std::map<std::string, Depth>{{"0", 4}, {"inf", 3}, {"1", 1}, {"-1", 1}}, "psi depth table");
    t.check(G.semistable && !G.stable, "g limit strictly semistable");
    t.check(F.stable, "psi limit stable");
    t.check(c.distinctness == "two families with non-equal limit classes", "distinctness method");
    verify_into(t, c, "G3 certificate");
}

void constant_witness(Tally& t) {
    const Certificate c = make_certificate(cat("S5"), 2);
    const std::size_t gi = family_index(c, "g"), hi = family_index(c, "h");
    for (std::size_t fi : {gi, hi}) {
        const FamilySpec& fam = c.families[fi];
        t.check(fam.closed_form_limit.has_value(), fam.label + " closed form present");
        if (!fam.closed_form_limit) continue;
        t.check(oracle_limit(fam, 0, 2) == *fam.closed_form_limit, fam.label + " closed form equals literal expansion");
        t.check(limit_of(c, fi).limit == *fam.closed_form_limit, fam.label + " pipeline equals closed form");
        t.check(limit_of(c, fi).stable, fam.label + " limit stable");
    }
    const PPoint zero = PPoint::at(GaussRat(0));
    t.check(depth(limit_of(c, gi).limit, zero) == 5, "d_0(g_2) = 5");
    t.check(depth(limit_of(c, hi).limit, zero) == 6, "d_0(h_2) = 6");
    verify_into(t, c, "S5 certificate");
}

void lambda_family_suite(Tally& t) {
    const std::vector<std::tuple<std::string, Map, int>> inputs{
        {"C1", cat("C1"), 3}, {"C2", cat("C2"), 2}, {"[X^3Y:Y^4]", x3y(), 3}};
    for (const auto& [name, f, n] : inputs) {
        const Certificate c = make_certificate(f, n);
        const std::string at = name + " n=" + std::to_string(n);
        t.check(c.families.size() == 1 && c.families[0].lambdas == default_lambdas(), at + ": lambda samples {2,3,5}");
        const long samples = static_cast<long>(c.limits.size());
        VerificationReport rep = verify_certificate(c);
        t.check(count_passed(rep, "Gauss reduction equals the base map") == samples, at + ": (a) Gauss reduction");
        t.check(count_passed(rep, ": stable") == samples, at + ": (b) stable limits");
        t.check(count_passed(rep, "distinct: pairwise non-equal classes") == 1, at + ": (c) pairwise distinct");
        t.check(count_passed(rep, "segment action independent of lambda") == 1, at + ": (d) lambda independence");
        t.check(rep.valid, at + ": certificate valid" + (rep.failures.empty() ? "" : " (" + rep.failures.front() + ")"));
    }
}

void berkovich_identities(Tally& t, unsigned seed) {
    set_surplus_checks(true);
    const long before = surplus_checks_performed();
    // Surplus composition on random pairs.
    std::mt19937 rng(seed);
    for (int pair = 0; pair < 50; ++pair) {
        const TMap phi = testsupport::random_factored(rng, 1 + pair % 2).expand();
        const TMap psi = testsupport::random_factored(rng, 2).expand();
        const TMap comp = psi.compose(phi);
        for (int k = 0; k < 5; ++k) {
            const TypeIIPoint xi = testsupport::random_type2(rng);
            const TangentData a = image_and_tangent(phi, xi), b = image_and_tangent(psi, a.image), ab = image_and_tangent(comp, xi);
            t.check(ab.image == b.image, "composite image");
            std::vector<Direction> probes{Direction::outward(), Direction::res(GaussRat(0)), Direction::res(GaussRat(1))};
            for (const auto& [v, s] : surplus_directions(a)) probes.push_back(v);
            for (const auto& [v, s] : surplus_directions(ab)) probes.push_back(v);
            for (const auto& v : probes) {
                const Direction w = tangent_image(a, v);
                t.check(surplus(ab, v) == psi.degree() * surplus(a, v) + surplus(b, w) * directional_multiplicity(a, v),
                        "surplus composition");
            }
        }
    }
    // Ledgers complete on every witness.
    const std::vector<std::pair<Map, int>> witnesses{{cat("G3"), 2}, {cat("F3"), 2}, {cat("S5"), 2}, {cat("C1"), 3},
                                                     {cat("C2"), 2}, {x3y(), 3},       {cat("P3"), 2}, {cat("P3"), 3},
                                                     {cat("M3"), 5}};
    for (const auto& [f, n] : witnesses) {
        const Certificate c = make_certificate(f, n);
        const Depth dn = static_cast<Depth>(std::pow(f.degree(), n) + 0.5);
        for (const auto& r : c.limits) {
            const Decomposition D = decompose(r.limit);
            Depth mass = 0, covered = 0;
            for (const auto& h : D.holes) mass += h.depth * h.cluster_degree();
            for (const auto& e : r.ledger) {
                t.check(e.ok && e.depth == e.predicted, "ledger entry " + poly_to_string(e.factor) + " of " + map_to_string(f));
                covered += e.depth * e.factor.degree();
            }
            t.check(covered == mass, "ledger covers every hole of " + map_to_string(r.limit));
            t.check(mass == dn - D.induced_degree(), "mass conservation");
        }
    }
    const long performed = surplus_checks_performed() - before;
    t.check(performed > 0, "surplus-sum identity exercised");
    t.checks += performed;  // each call asserted the identity (a violation throws)
}

void structural(Tally& t) {
    for (const auto& e : catalog())
        for (const auto& x : e.expectations) {
            if (!x.unstable) continue;
            const Map& f = e.map;
            const int n = x.n;
            const std::string at = e.name + " n=" + std::to_string(n);
            t.guard(at, [&] {
                const PPoint h = bad_hole(f, n);  // throws when not unique
                t.check(true, at + ": bad hole unique");
                t.check(is_n_unstable(f, n + 1), at + ": in U_{n+1}");
                t.check(bad_hole(f, n + 1) == h, at + ": bad hole persists");
                const Decomposition D = decompose(f);
                const Depth dh = point_order(D.h, h);
                const int m = D.induced_degree() >= 1 ? local_multiplicity(D.induced, h) : 0;
                if (D.induced_degree() >= 1) t.check(2 * dh + m > D.d, at + ": 2 d_h + m_h > d");
                else t.check(2 * dh == D.d + 1, at + ": constant case depth (d+1)/2");
                if (dh == 1) {
                    // Depth one forces m_h = deg f̂ = d - 1 and one of the two normal forms.
                    t.check(m == D.d - 1 && D.induced_degree() == D.d - 1, at + ": total ramification at h");
                    const CaseTag tag = classify_case(f, n);
                    const bool fixed = apply(D.induced, h) == h;
                    t.check(tag.kind == (fixed ? CaseKind::Case4 : CaseKind::Case5), at + ": depth-one dichotomy");
                    t.check(tag.normalizer.has_value(), at + ": normalizer present");
                    if (tag.normalizer) {
                        const Map g = canonical(conjugate(D.induced, *tag.normalizer));
                        const int e1 = g.degree();
                        bool poly = true, mono = true;
                        for (int j = 1; j <= e1; ++j) poly = poly && g.q.c[static_cast<std::size_t>(j)].is_zero();
                        for (int j = 0; j <= e1; ++j) {
                            if (j != 0) mono = mono && g.p.c[static_cast<std::size_t>(j)].is_zero();
                            if (j != e1) mono = mono && g.q.c[static_cast<std::size_t>(j)].is_zero();
                        }
                        t.check(fixed ? poly : mono, at + (fixed ? ": polynomial normal form" : ": z^-(d-1) normal form"));
                    }
                }
            });
        }
}

void negative_controls(Tally& t, unsigned seed) {
    std::mt19937 rng(seed);
    int seen = 0;
    while (seen < 20) {
        const Map f = testsupport::random_nondegenerate(rng, 3 + seen % 2);
        if (!is_stable(f)) continue;
        ++seen;
        const int n = 2 + seen % 2;
        t.check(!is_n_unstable(f, n), "U_n false for " + map_to_string(f));
        bool refused = false;
        try {
            make_certificate(f, n);
        } catch (const NotApplicable&) {
            refused = true;
        }
        t.check(refused, "witness refuses " + map_to_string(f));
    }
    Certificate c = make_certificate(cat("G3"), 2);
    c.limits[0].ledger[0].depth += 1;
    const VerificationReport rep = verify_certificate(c);
    bool pointer = false;
    for (const auto& f : rep.failures) pointer = pointer || f.find("ledger entry 0") != std::string::npos;
    t.check(!rep.valid && pointer, "corrupted certificate rejected with a ledger pointer");
}

struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<void(Tally&, unsigned)> body;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "depth formula equals literal compose+gcd", 60, depth_oracle},
        {2, "stability catalog verdicts", 5, [](Tally& t, unsigned) { catalog_verdicts(t); }},
        {3, "cubic polynomial witness at G3, n=2", 30, [](Tally& t, unsigned) { cubic_witness(t); }},
        {4, "constant-case witness at S5, n=2", 10, [](Tally& t, unsigned) { constant_witness(t); }},
        {5, "lambda-family property suite (C1, C2, d=4 polynomial)", 120, [](Tally& t, unsigned) { lambda_family_suite(t); }},
        {6, "Berkovich identities and ledgers", 120, berkovich_identities},
        {7, "structural properties of U_n catalog members", 30, [](Tally& t, unsigned) { structural(t); }},
        {8, "negative controls", 60, negative_controls},
    };
    return all;
}

}  // namespace

std::vector<CriterionResult> run(unsigned seed, const std::vector<int>& only) {
    std::vector<CriterionResult> out;
    for (const auto& c : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        Tally t;
        const auto t0 = std::chrono::steady_clock::now();
        t.guard("uncaught", [&] { c.body(t, seed); });
        CriterionResult r;
        r.id = c.id;
        r.name = c.name;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.limit = c.limit;
        r.checks = t.checks;
        r.violations = t.violations;
        for (const auto& n : t.notes) r.detail += (r.detail.empty() ? "" : "; ") + n;
        if (r.seconds > r.limit) r.detail += (r.detail.empty() ? "" : "; ") + std::string("time limit exceeded");
        r.ok = t.violations == 0 && t.checks > 0 && r.seconds <= r.limit;
        out.push_back(r);
    }
    return out;
}

std::string format_line(const CriterionResult& r, bool with_time) {
    std::ostringstream s;
    s << (r.ok ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << " (" << r.checks << " checks, "
      << r.violations << " violations";
    if (with_time) s << ", " << std::fixed << std::setprecision(2) << r.seconds << " s of " << std::setprecision(0) << r.limit << " s";
    s << ")";
    if (!r.detail.empty()) s << " -- " << r.detail;
    return s.str();
}

}  // namespace degmap::suite
