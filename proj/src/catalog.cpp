#include "degmap/catalog.hpp"

#include <stdexcept>

namespace degmap {

Map map_from_ints(const std::vector<long>& p, const std::vector<long>& q) {
    std::vector<GaussRat> a, b;
    for (long x : p) a.emplace_back(x);
    for (long x : q) b.emplace_back(x);
    return canonical(Map{Poly(a), Poly(b)});
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        const PPoint inf = PPoint::infinity(), zero = PPoint::at(GaussRat(0));
        std::vector<CatalogEntry> e;
        e.push_back({"G3", "[X^2Y : Y^3]", map_from_ints({0, 0, 1, 0}, {1, 0, 0, 0}), true, false, false,
                     {{2, true, CaseKind::Case4, inf}, {3, true, CaseKind::Case4, inf}}});
        e.push_back({"F3", "[X^2Y : 0]", map_from_ints({0, 0, 1, 0}, {0, 0, 0, 0}), true, false, true,
                     {{2, false, {}, {}}, {3, false, {}, {}}}});
        e.push_back({"M3", "[Y^3 : X^2Y]", map_from_ints({1, 0, 0, 0}, {0, 0, 1, 0}), true, true, false,
                     {{2, false, {}, {}},
                      {3, false, {}, {}},
                      {4, false, {}, {}},
                      {5, true, CaseKind::Case5, inf},
                      {6, true, CaseKind::Case5, inf}}});
        e.push_back({"P3", "[X^2Y : X^3]", map_from_ints({0, 0, 1, 0}, {0, 0, 0, 1}), true, false, false,
                     {{2, true, CaseKind::Case0, zero}, {3, true, CaseKind::Case3, zero}}});
        e.push_back({"C1", "[X^3(X^2-XY+Y^2) : X^3Y^2]", map_from_ints({0, 0, 0, 1, -1, 1}, {0, 0, 0, 1, 0, 0}), true,
                     false, false, {{2, true, CaseKind::Case0, zero}, {3, true, CaseKind::Case1, zero}}});
        e.push_back({"C2", "[X^4(X-Y) : X^2(X-Y)Y^2]", map_from_ints({0, 0, 0, 0, -1, 1}, {0, 0, -1, 1, 0, 0}), true,
                     false, false, {{2, true, CaseKind::Case2, zero}, {3, true, CaseKind::Case2, zero}}});
        e.push_back({"S5", "XY(X-Y)^2(X-2Y)[0:1]", map_from_ints({0, 0, 0, 0, 0, 0}, {0, -2, 5, -4, 1, 0}), true, true,
                     true, {{2, false, {}, {}}, {3, false, {}, {}}}});
        return e;
    }();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw std::out_of_range("unknown catalog entry '" + name + "'");
}

}  // namespace degmap
