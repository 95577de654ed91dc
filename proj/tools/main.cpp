// degmap: command-line front end over the library.
// Exit codes: 0 success, 2 verification failure, 3 input error.
#include "suite.hpp"

#include "degmap/catalog.hpp"
#include "degmap/serialize.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace degmap;

namespace {

constexpr int kOk = 0, kVerificationFailure = 2, kInputError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path, "cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// A catalog name, inline JSON, or a path to a JSON file.
Json json_argument(const std::string& arg) {
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return parse_json_text(arg);
    return parse_json_text(read_file(arg));
}

Map map_argument(const std::string& arg) {
    for (const auto& e : catalog())
        if (e.name == arg) return e.map;
    return map_from_json(json_argument(arg));
}

std::vector<GaussRat> parse_lambdas(const std::string& s) {
    std::vector<GaussRat> out;
    std::stringstream ss(s);
    std::string item;
    for (int i = 0; std::getline(ss, item, ','); ++i) {
        try {
            out.push_back(GaussRat::parse(item));
        } catch (const std::exception& e) {
            throw InputError("--lambda item " + std::to_string(i), e.what());
        }
    }
    return out;
}

Json point_or_factor(const HoleEntry& h) { return h.split ? Json(h.point.to_string()) : Json(poly_to_json(h.factor)); }

Json decomposition_json(const Decomposition& D) {
    Json holes = Json::array();
    for (const auto& h : D.holes) holes.push_back(Json{{"hole", point_or_factor(h)}, {"depth", h.depth}});
    return Json{{"degree", D.d}, {"H", poly_to_json(D.h)}, {"induced", map_to_json(D.induced)}, {"holes", holes}};
}

Json case_json(CaseKind k) {
    switch (k) {
        case CaseKind::Case0: return 0;
        case CaseKind::Case1: return 1;
        case CaseKind::Case2: return 2;
        case CaseKind::Case3: return 3;
        case CaseKind::Case4: return 4;
        case CaseKind::Case5: return 5;
        case CaseKind::ConstantInduced: return "constant";
        default: return nullptr;
    }
}

/// Flat "key: value" rendering of a JSON object.
void print(const Json& j, bool as_json) {
    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    for (const auto& [k, v] : j.items()) std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

int cmd_analyze(const Map& f0, int n, bool as_json) {
    const Map f = canonical(f0);
    const Decomposition D = decompose(f);
    Json j;
    j["map"] = map_to_json(f);
    j["decomposition"] = decomposition_json(D);
    j["Rat_d"] = D.h.degree() == 0;
    j["stable"] = is_stable(f);
    j["semistable"] = is_semistable(f);
    j["I(d)"] = is_in_Id(D);
    j["n"] = n;
    const bool un = is_n_unstable(f, n);
    j["U_n"] = un;
    if (un) {
        const CaseTag tag = classify_case(f, n);
        j["case"] = case_json(tag.kind);
        j["badHole"] = tag.bad_hole.to_string();
        j["badDepth"] = tag.bad_depth;
    } else {
        j["case"] = nullptr;
        j["badHole"] = nullptr;
    }
    if (is_in_Id(D)) {
        j["iterateHoles"] = nullptr;  // f^n is undefined on the indeterminacy locus
    } else {
        Json rows = Json::array();
        for (const auto& g : iterate_factored(f, n).groups()) {
            Decomposition one = decompose(Map{g.factor, Poly::zero(g.factor.degree())});
            for (const auto& h : one.holes)
                rows.push_back(Json{{"hole", point_or_factor(h)}, {"depth", g.mult}});
        }
        j["iterateHoles"] = rows;
    }
    print(j, as_json);
    return kOk;
}

int cmd_iterate(const Map& f, int n, long budget, bool as_json) {
    const Map fn = iterate_compose(f, n, budget);
    Json j;
    j["n"] = n;
    j["iterate"] = map_to_json(fn);
    j["decomposition"] = decomposition_json(decompose(fn));
    j["semistable"] = is_semistable(fn);
    j["stable"] = is_stable(fn);
    print(j, as_json);
    return kOk;
}

/// Input: {"map": TMap, "center": TPoly (optional), "alpha": rational (optional)}.
int cmd_reduce(const Json& in, int n, bool as_json) {
    if (!in.is_object() || !in.contains("map")) throw InputError("/", "expected {\"map\": ..., \"center\": ..., \"alpha\": ...}");
    const TMap g = tmap_from_json(in["map"], "/map");
    const TPoly center = in.contains("center") ? tpoly_from_json(in["center"], "/center") : TPoly();
    Rational alpha = 0;
    if (in.contains("alpha")) {
        try {
            alpha = parse_rational(in["alpha"].is_string() ? in["alpha"].get<std::string>() : in["alpha"].dump());
        } catch (const std::exception& e) {
            throw InputError("/alpha", e.what());
        }
    }
    const TypeIIPoint xi(center, alpha);
    const Map r = reduce_iterate_at(g, n, affine_chart(xi));
    Json j;
    j["point"] = xi.to_string();
    j["n"] = n;
    j["gaussReduction"] = map_to_json(coefficient_reduction(g));
    j["reduction"] = map_to_json(r);
    j["decomposition"] = decomposition_json(decompose(r));
    j["semistable"] = is_semistable(r);
    j["stable"] = is_stable(r);
    print(j, as_json);
    return kOk;
}

void print_certificate_summary(const Certificate& c, const VerificationReport& rep) {
    std::cout << "case: " << case_name(c.kind) << "\n";
    std::cout << "n: " << c.n << "\n";
    std::cout << "base: " << map_to_string(c.base) << "\n";
    for (const auto& id : c.identifications) std::cout << "identification: " << id.note << "\n";
    for (const auto& f : c.families) {
        std::cout << "family " << f.label << " (" << f.maps.size() << " maps, zeta0 = " << f.zeta0.to_string() << ")\n";
        for (const auto& [k, v] : f.parameters) std::cout << "  " << k << " = " << v << "\n";
        long ok = 0;
        for (const auto& ch : f.checks) ok += ch.ok;
        std::cout << "  checks: " << ok << "/" << f.checks.size() << "\n";
    }
    for (const auto& r : c.limits) {
        const FamilySpec& f = c.families[r.family];
        std::cout << "limit " << f.label;
        if (!f.lambdas.empty()) std::cout << "[lambda=" << f.lambdas[r.sample].to_string() << "]";
        std::cout << ": " << (r.stable ? "stable" : r.semistable ? "semistable" : "unstable") << ", holes";
        for (const auto& e : r.ledger) std::cout << " " << poly_to_string(e.factor) << ":" << e.depth;
        std::cout << "\n";
    }
    std::cout << "distinctness: " << c.distinctness << "\n";
    for (const auto& d : c.distinctness_details) std::cout << "  " << d << "\n";
    std::cout << "verification: " << (rep.valid ? "valid" : "INVALID") << "\n";
    for (const auto& f : rep.failures) std::cout << "  failure: " << f << "\n";
}

int cmd_witness(const Map& f, int n, const std::vector<GaussRat>& lambdas, bool as_json, const std::string& out) {
    Certificate c;
    try {
        c = make_certificate(f, n, lambdas);
    } catch (const NotApplicable& e) {
        std::cout << "NotApplicable: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        throw InputError("witness", e.what());
    } catch (const std::exception& e) {
        std::cout << "construction failed: " << e.what() << "\n";
        return kVerificationFailure;
    }
    const VerificationReport rep = verify_certificate(c);
    const Json cj = certificate_to_json(c);
    if (!out.empty()) {
        std::ofstream o(out);
        if (!o) throw InputError(out, "cannot write file");
        o << cj.dump(2) << "\n";
    }
    if (as_json) {
        Json j = cj;
        j["verification"] = Json{{"valid", rep.valid}, {"failures", rep.failures}};
        std::cout << j.dump(2) << "\n";
    } else {
        print_certificate_summary(c, rep);
    }
    return rep.valid ? kOk : kVerificationFailure;
}

int cmd_replay(const std::string& path, bool as_json) {
    const std::string text = read_file(path);
    const Json stored = parse_json_text(text);
    const Certificate c = certificate_from_json(stored);
    // Bit-exact: the parsed certificate re-serializes to the stored document.
    const bool exact = certificate_to_json(c) == stored;
    const VerificationReport rep = verify_certificate(c);
    const bool ok = exact && rep.valid;
    if (as_json) {
        Json failures = rep.failures;
        if (!exact) failures.push_back("stored document does not round-trip exactly");
        std::cout << Json{{"replay", path}, {"valid", ok}, {"failures", failures}}.dump(2) << "\n";
    } else {
        std::cout << "replay: " << path << "\n";
        std::cout << "round-trip: " << (exact ? "exact" : "MISMATCH") << "\n";
        std::cout << "verification: " << (rep.valid ? "valid" : "INVALID") << " (" << rep.passed.size() << " checks passed)\n";
        for (const auto& f : rep.failures) std::cout << "  failure: " << f << "\n";
    }
    return ok ? kOk : kVerificationFailure;
}

int cmd_selftest(unsigned seed, const std::vector<int>& only, bool as_json) {
    const auto results = suite::run(seed, only);
    bool all = true;
    Json rows = Json::array();
    for (const auto& r : results) {
        all = all && r.ok;
        if (as_json)
            rows.push_back(Json{{"criterion", r.id}, {"name", r.name}, {"ok", r.ok}, {"checks", r.checks},
                                {"violations", r.violations}, {"detail", r.detail}});
        else
            std::cout << suite::format_line(r, false) << "\n";
    }
    if (as_json) std::cout << Json{{"seed", seed}, {"passed", all}, {"criteria", rows}}.dump(2) << "\n";
    else std::cout << "selftest: " << (all ? "all criteria passed" : "FAILURES") << "\n";
    return all ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Degenerate rational maps: holes, stability, iterate limits and certificates"};
    app.require_subcommand(0, 1);
    bool as_json = false;
    std::string replay;
    app.add_flag("--json", as_json, "Emit JSON");
    app.add_option("--replay", replay, "Re-verify a stored certificate");

    std::string map_arg, reduce_arg, lambdas = "2,3,5", out;
    int n = 2;
    long budget = 2000;
    unsigned seed = 1;
    std::vector<int> only;

    auto* analyze = app.add_subcommand("analyze", "Decomposition, verdicts, bad hole, case tag, depth table of f^n");
    analyze->add_option("map", map_arg, "Catalog name, JSON {\"P\":[...],\"Q\":[...]}, or file")->required();
    analyze->add_option("--n", n, "Iterate")->check(CLI::Range(1, 64));

    auto* iterate = app.add_subcommand("iterate", "Literal n-th iterate");
    iterate->add_option("map", map_arg)->required();
    iterate->add_option("--n", n)->check(CLI::Range(1, 64));
    iterate->add_option("--budget", budget, "Maximum degree of the literal iterate");

    auto* reduce = app.add_subcommand("reduce", "Reduction of g^n at a type II point");
    reduce->add_option("input", reduce_arg, "JSON {\"map\":..., \"center\":..., \"alpha\":...} or file")->required();
    reduce->add_option("--n", n)->check(CLI::Range(1, 64));

    auto* witness = app.add_subcommand("witness", "Build and verify an indeterminacy certificate");
    witness->add_option("map", map_arg)->required();
    witness->add_option("--n", n)->check(CLI::Range(2, 64));
    witness->add_option("--lambda", lambdas, "Comma-separated lambda samples");
    witness->add_option("--out", out, "Write the certificate JSON here");

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest->add_option("--seed", seed, "Seed for the random generators");
    selftest->add_option("--only", only, "Criteria to run")->delimiter(',');

    for (auto* sub : {analyze, iterate, reduce, witness, selftest}) sub->add_flag("--json", as_json, "Emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), kInputError);
    }

    try {
        if (!replay.empty()) return cmd_replay(replay, as_json);
        if (analyze->parsed()) return cmd_analyze(map_argument(map_arg), n, as_json);
        if (iterate->parsed()) return cmd_iterate(map_argument(map_arg), n, budget, as_json);
        if (reduce->parsed()) return cmd_reduce(json_argument(reduce_arg), n, as_json);
        if (witness->parsed()) return cmd_witness(map_argument(map_arg), n, parse_lambdas(lambdas), as_json, out);
        if (selftest->parsed()) return cmd_selftest(seed, only, as_json);
        std::cout << app.help();
        return kInputError;
    } catch (const InputError& e) {
        std::cerr << "input error at " << e.what() << "\n";
        return kInputError;
    } catch (const BudgetExceeded& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    }
}
