#pragma once

#include "degmap/berkspace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degmap {

struct NotApplicable : std::domain_error {
    using std::domain_error::domain_error;
};
struct OrbitNotSplit : std::domain_error {
    using std::domain_error::domain_error;
};
struct PropertyVerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SelectionInfeasible : std::logic_error {
    using std::logic_error::logic_error;
};
struct BetaSearchExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One verified property of a construction; expected/actual are printable values.
struct Check {
    std::string name;
    std::string expected;
    std::string actual;
    bool ok = false;
};

/// A degenerating family g_t (one map per lambda sample) together with its chart M_t.
struct FamilySpec {
    std::string label;                 // "g", "psi", "h", ...
    CaseKind kind = CaseKind::NotUnstable;
    std::vector<GaussRat> lambdas;     // empty: the family has no lambda parameter
    std::vector<TMap> maps;            // one per lambda sample (or exactly one)
    TypeIIPoint zeta0;                 // conjugator is affine_chart(zeta0)
    TMap conjugator;
    bool claims_stable = true;         // otherwise the limit is claimed semistable
    bool degenerate = false;           // members are degenerate maps (constant induced map)
    /// Ordered parameter record: N, S, k, k_star, q_star, r_star, ell, d_plus, ..., e.
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<Check> checks;
    /// Closed-form limit when the construction provides one (degenerate families).
    std::optional<Map> closed_form_limit;
};

/// [from] = [limit]: the reduction of M^{-1} ∘ from ∘ M equals limit.
struct Identification {
    std::string note;
    Map from;
    TMap conjugator;
    Map limit;
};

struct LedgerEntry {
    Poly factor;        // hole factor of the limit (linear or cluster)
    Depth depth = 0;    // from decompose(limit)
    Depth predicted = 0;
    std::string source; // "surplus" or "closed-form"
    bool ok = false;
};

struct LimitRecord {
    int family = 0;
    int sample = 0;
    Map limit;
    bool semistable = false;
    bool stable = false;
    std::vector<LedgerEntry> ledger;
};

struct Certificate {
    Map input;
    int n = 0;
    CaseKind kind = CaseKind::NotUnstable;
    Map normalizer;          // input = normalizer ∘ base ∘ normalizer^{-1} up to the identifications
    Map base;                // the map every family degenerates to
    std::vector<Identification> identifications;
    std::vector<FamilySpec> families;
    std::vector<LimitRecord> limits;
    std::string distinctness;               // how non-equality of classes is certified
    std::vector<std::string> distinctness_details;
};

struct VerificationReport {
    bool valid = false;
    std::vector<std::string> passed;
    std::vector<std::string> failures;
};

/// Default lambda samples.
std::vector<GaussRat> default_lambdas();

/// Builders work on the normalized base map; they return the families and record
/// the normalization in the returned certificate skeleton (limits not yet computed).
Certificate build_case1(const Map& f, int n, const std::vector<GaussRat>& lambdas);
Certificate build_case02(const Map& f, int n, const std::vector<GaussRat>& lambdas);
Certificate build_case3(const Map& f, int n, const std::vector<GaussRat>& lambdas);
Certificate build_case4(const Map& f, int n, const std::vector<GaussRat>& lambdas);
Certificate build_case5(const Map& f, int n, const std::vector<GaussRat>& lambdas);
Certificate build_constant(const Map& f, int n, const std::vector<GaussRat>& lambdas);

/// Classify, build, compute limits and ledgers; throws NotApplicable outside I(d) ∪ U_n.
Certificate make_certificate(const Map& f, int n, const std::vector<GaussRat>& lambdas = default_lambdas());

/// Re-derives every limit, verdict, ledger entry and distinctness claim.
VerificationReport verify_certificate(const Certificate& c);

/// Predicted depths for every hole of a limit of a non-degenerate family.
std::vector<LedgerEntry> surplus_ledger(const TMap& g, const TypeIIPoint& zeta0, int n, const Map& limit);

}  // namespace degmap
