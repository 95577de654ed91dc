#pragma once

#include "degmap/projmap.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degmap {

/// Build [P:Q] from integer coefficient lists (index = power of X).
Map map_from_ints(const std::vector<long>& p, const std::vector<long>& q);

struct CatalogExpectation {
    int n = 2;
    bool unstable = false;
    std::optional<CaseKind> kind;
    std::optional<PPoint> bad_hole;
};

struct CatalogEntry {
    std::string name;
    std::string formula;
    Map map;
    bool semistable = false;
    bool stable = false;
    bool in_Id = false;
    std::vector<CatalogExpectation> expectations;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);

}  // namespace degmap
