#include "degmap/serialize.hpp"

namespace degmap {

namespace {

const Json& field(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw InputError(where.empty() ? "/" : where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw InputError(where + "/" + key, "missing field");
    return *it;
}

std::string text(const Json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw InputError(where, "expected a string or integer");
}

GaussRat scalar(const Json& j, const std::string& where) {
    try {
        return GaussRat::parse(text(j, where));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(where, e.what());
    }
}

Rational rational(const Json& j, const std::string& where) {
    try {
        return parse_rational(text(j, where));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(where, e.what());
    }
}

template <class T, class F>
std::vector<T> list(const Json& j, const std::string& where, F item) {
    if (!j.is_array()) throw InputError(where, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], where + "/" + std::to_string(i)));
    return out;
}

Json point_json(const TypeIIPoint& x) { return Json{{"center", tpoly_to_json(x.center())}, {"alpha", rat_to_string(x.alpha())}}; }

TypeIIPoint point_from(const Json& j, const std::string& w) {
    return {tpoly_from_json(field(j, "center", w), w + "/center"), rational(field(j, "alpha", w), w + "/alpha")};
}

Json checks_json(const std::vector<Check>& cs) {
    Json a = Json::array();
    for (const auto& c : cs) a.push_back(Json{{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"ok", c.ok}});
    return a;
}

}  // namespace

Json poly_to_json(const Poly& p) {
    Json a = Json::array();
    for (const auto& c : p.c) a.push_back(c.to_string());
    return a;
}

Poly poly_from_json(const Json& j, const std::string& where) {
    auto cs = list<GaussRat>(j, where, scalar);
    if (cs.empty()) throw InputError(where, "empty coefficient list");
    return Poly(cs);
}

Json map_to_json(const Map& f) { return Json{{"P", poly_to_json(f.p)}, {"Q", poly_to_json(f.q)}}; }

Map map_from_json(const Json& j, const std::string& where) {
    Poly p = poly_from_json(field(j, "P", where), where + "/P"), q = poly_from_json(field(j, "Q", where), where + "/Q");
    if (p.degree() != q.degree())
        throw InputError(where, "P and Q have different lengths (" + std::to_string(p.c.size()) + " vs " +
                                    std::to_string(q.c.size()) + ")");
    return {p, q};
}

Json tpoly_to_json(const TPoly& x) {
    Json a = Json::array();
    for (const auto& tm : x.terms()) a.push_back(Json::array({rat_to_string(tm.exp), tm.coef.to_string()}));
    return a;
}

TPoly tpoly_from_json(const Json& j, const std::string& where) {
    auto terms = list<TPoly::Term>(j, where, [](const Json& e, const std::string& w) {
        if (!e.is_array() || e.size() != 2) throw InputError(w, "expected [exponent, coefficient]");
        return TPoly::Term{rational(e[0], w + "/0"), scalar(e[1], w + "/1")};
    });
    return TPoly::from_terms(terms);
}

Json tmap_to_json(const TMap& f) {
    Json p = Json::array(), q = Json::array();
    for (const auto& c : f.p.c) p.push_back(tpoly_to_json(c));
    for (const auto& c : f.q.c) q.push_back(tpoly_to_json(c));
    return Json{{"P", p}, {"Q", q}};
}

TMap tmap_from_json(const Json& j, const std::string& where) {
    auto side = [&](const char* k) {
        return TPolyH(list<TPoly>(field(j, k, where), where + "/" + k, [](const Json& e, const std::string& w) {
            return tpoly_from_json(e, w);
        }));
    };
    TPolyH p = side("P"), q = side("Q");
    if (p.degree() != q.degree()) throw InputError(where, "P and Q have different lengths");
    return {p, q};
}

CaseKind case_from_name(const std::string& s) {
    for (CaseKind k : {CaseKind::NotUnstable, CaseKind::Case0, CaseKind::Case1, CaseKind::Case2, CaseKind::Case3,
                       CaseKind::Case4, CaseKind::Case5, CaseKind::ConstantInduced})
        if (case_name(k) == s) return k;
    throw InputError("", "unknown case tag '" + s + "'");
}

Json certificate_to_json(const Certificate& c) {
    Json j;
    j["input"] = map_to_json(c.input);
    j["n"] = c.n;
    j["case"] = case_name(c.kind);
    j["normalizer"] = map_to_json(c.normalizer);
    j["base"] = map_to_json(c.base);
    Json ids = Json::array();
    for (const auto& id : c.identifications)
        ids.push_back(Json{{"note", id.note}, {"from", map_to_json(id.from)}, {"conjugator", tmap_to_json(id.conjugator)},
                           {"limit", map_to_json(id.limit)}});
    j["identifications"] = ids;
    Json fams = Json::array();
    for (const auto& f : c.families) {
        Json fj;
        fj["label"] = f.label;
        fj["case"] = case_name(f.kind);
        Json lams = Json::array();
        for (const auto& l : f.lambdas) lams.push_back(l.to_string());
        fj["lambdas"] = lams;
        Json maps = Json::array();
        for (const auto& m : f.maps) maps.push_back(tmap_to_json(m));
        fj["maps"] = maps;
        fj["zeta0"] = point_json(f.zeta0);
        fj["conjugator"] = tmap_to_json(f.conjugator);
        fj["claims_stable"] = f.claims_stable;
        fj["degenerate"] = f.degenerate;
        Json params = Json::array();
        for (const auto& [k, v] : f.parameters) params.push_back(Json::array({k, v}));
        fj["parameters"] = params;
        fj["checks"] = checks_json(f.checks);
        fj["closed_form_limit"] = f.closed_form_limit ? map_to_json(*f.closed_form_limit) : Json(nullptr);
        fams.push_back(fj);
    }
    j["families"] = fams;
    Json lims = Json::array();
    for (const auto& r : c.limits) {
        Json lj;
        lj["family"] = r.family;
        lj["sample"] = r.sample;
        lj["limit"] = map_to_json(r.limit);
        lj["semistable"] = r.semistable;
        lj["stable"] = r.stable;
        Json led = Json::array();
        for (const auto& e : r.ledger)
            led.push_back(Json{{"factor", poly_to_json(e.factor)}, {"depth", e.depth}, {"predicted", e.predicted},
                               {"source", e.source}, {"ok", e.ok}});
        lj["ledger"] = led;
        lims.push_back(lj);
    }
    j["limits"] = lims;
    j["distinctness"] = c.distinctness;
    j["distinctness_details"] = c.distinctness_details;
    return j;
}

Certificate certificate_from_json(const Json& j) {
    auto boolean = [](const Json& v, const std::string& w) {
        if (!v.is_boolean()) throw InputError(w, "expected a boolean");
        return v.get<bool>();
    };
    auto integer = [](const Json& v, const std::string& w) {
        if (!v.is_number_integer()) throw InputError(w, "expected an integer");
        return v.get<long long>();
    };
    auto string = [](const Json& v, const std::string& w) {
        if (!v.is_string()) throw InputError(w, "expected a string");
        return v.get<std::string>();
    };
    Certificate c;
    c.input = map_from_json(field(j, "input", ""), "/input");
    c.n = static_cast<int>(integer(field(j, "n", ""), "/n"));
    c.kind = case_from_name(string(field(j, "case", ""), "/case"));
    c.normalizer = map_from_json(field(j, "normalizer", ""), "/normalizer");
    c.base = map_from_json(field(j, "base", ""), "/base");
    c.identifications = list<Identification>(field(j, "identifications", ""), "/identifications",
                                             [&](const Json& e, const std::string& w) {
                                                 return Identification{string(field(e, "note", w), w + "/note"),
                                                                       map_from_json(field(e, "from", w), w + "/from"),
                                                                       tmap_from_json(field(e, "conjugator", w), w + "/conjugator"),
                                                                       map_from_json(field(e, "limit", w), w + "/limit")};
                                             });
    c.families = list<FamilySpec>(field(j, "families", ""), "/families", [&](const Json& e, const std::string& w) {
        FamilySpec f;
        f.label = string(field(e, "label", w), w + "/label");
        f.kind = case_from_name(string(field(e, "case", w), w + "/case"));
        f.lambdas = list<GaussRat>(field(e, "lambdas", w), w + "/lambdas", scalar);
        f.maps = list<TMap>(field(e, "maps", w), w + "/maps", [](const Json& m, const std::string& mw) {
            return tmap_from_json(m, mw);
        });
        f.zeta0 = point_from(field(e, "zeta0", w), w + "/zeta0");
        f.conjugator = tmap_from_json(field(e, "conjugator", w), w + "/conjugator");
        f.claims_stable = boolean(field(e, "claims_stable", w), w + "/claims_stable");
        f.degenerate = boolean(field(e, "degenerate", w), w + "/degenerate");
        f.parameters = list<std::pair<std::string, std::string>>(
            field(e, "parameters", w), w + "/parameters", [&](const Json& p, const std::string& pw) {
                if (!p.is_array() || p.size() != 2) throw InputError(pw, "expected [key, value]");
                return std::pair{string(p[0], pw + "/0"), string(p[1], pw + "/1")};
            });
        f.checks = list<Check>(field(e, "checks", w), w + "/checks", [&](const Json& ch, const std::string& cw) {
            return Check{string(field(ch, "name", cw), cw + "/name"), string(field(ch, "expected", cw), cw + "/expected"),
                         string(field(ch, "actual", cw), cw + "/actual"), boolean(field(ch, "ok", cw), cw + "/ok")};
        });
        const Json& cf = field(e, "closed_form_limit", w);
        if (!cf.is_null()) f.closed_form_limit = map_from_json(cf, w + "/closed_form_limit");
        return f;
    });
    c.limits = list<LimitRecord>(field(j, "limits", ""), "/limits", [&](const Json& e, const std::string& w) {
        LimitRecord r;
        r.family = static_cast<int>(integer(field(e, "family", w), w + "/family"));
        r.sample = static_cast<int>(integer(field(e, "sample", w), w + "/sample"));
        r.limit = map_from_json(field(e, "limit", w), w + "/limit");
        r.semistable = boolean(field(e, "semistable", w), w + "/semistable");
        r.stable = boolean(field(e, "stable", w), w + "/stable");
        r.ledger = list<LedgerEntry>(field(e, "ledger", w), w + "/ledger", [&](const Json& l, const std::string& lw) {
            LedgerEntry x;
            x.factor = poly_from_json(field(l, "factor", lw), lw + "/factor");
            x.depth = integer(field(l, "depth", lw), lw + "/depth");
            x.predicted = integer(field(l, "predicted", lw), lw + "/predicted");
            x.source = string(field(l, "source", lw), lw + "/source");
            x.ok = boolean(field(l, "ok", lw), lw + "/ok");
            return x;
        });
        return r;
    });
    c.distinctness = string(field(j, "distinctness", ""), "/distinctness");
    c.distinctness_details = list<std::string>(field(j, "distinctness_details", ""), "/distinctness_details", string);
    return c;
}

Json parse_json_text(const std::string& s) {
    try {
        return Json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("byte " + std::to_string(e.byte), e.what());
    }
}

}  // namespace degmap
