#pragma once

#include "degmap/witness.hpp"

#include "json.hpp"

#include <string>

namespace degmap {

using Json = nlohmann::ordered_json;

/// Malformed input; `where` is a JSON pointer or a byte offset.
struct InputError : std::invalid_argument {
    std::string where;
    InputError(const std::string& where_, const std::string& what_)
        : std::invalid_argument((where_.empty() ? "/" : where_) + ": " + what_), where(where_.empty() ? "/" : where_) {}
};

/// Poly as coefficient strings, index = power of X; degree is the length minus one.
Json poly_to_json(const Poly& p);
Poly poly_from_json(const Json& j, const std::string& where = "");
/// {"P": [...], "Q": [...]}; the two lists must have equal length.
Json map_to_json(const Map& f);
Map map_from_json(const Json& j, const std::string& where = "");

Json tpoly_to_json(const TPoly& x);
TPoly tpoly_from_json(const Json& j, const std::string& where = "");
Json tmap_to_json(const TMap& f);
TMap tmap_from_json(const Json& j, const std::string& where = "");

CaseKind case_from_name(const std::string& s);

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

/// Parse text as JSON, reporting the byte offset of syntax errors.
Json parse_json_text(const std::string& text);

}  // namespace degmap
