#pragma once

#include "catch_amalgamated.hpp"

#include "kapitza/contour.hpp"
#include "kapitza/oracle.hpp"
#include "kapitza/potential.hpp"
#include "kapitza/series.hpp"
#include "kapitza/tunneling.hpp"
#include "kapitza/wavefn.hpp"

#include "generated_numeric_fixtures.hpp"
#include "generated_series_fixtures.hpp"

#include <map>
#include <utility>

namespace testsupport {

// Exponent table row -> polynomial in (E, A).
inline kapitza::BiPoly exponent_fixture(int l) {
    kapitza::BiPoly out;
    for (const auto& m : kapfix::kExponentCoeffs)
        if (m.l == l) out.add_term(m.pe, m.pa, kapitza::rat_from_string(m.coeff));
    return out;
}

// Well-energy table row -> polynomial in (mu + 1/2, A).
inline kapitza::BiPoly energy_fixture(int k) {
    kapitza::BiPoly out;
    for (const auto& m : kapfix::kWellEnergyCoeffs)
        if (m.k == k) out.add_term(m.pm, m.pa, kapitza::rat_from_string(m.coeff));
    return out;
}

// Expansion-order table rows -> (cos power, sin power) slot map.
inline std::map<std::pair<int, int>, kapitza::BiPoly> riccati_fixture(int l) {
    std::map<std::pair<int, int>, kapitza::BiPoly> out;
    for (const auto& m : kapfix::kRiccatiOrders) {
        if (m.l != l) continue;
        auto [it, inserted] = out.try_emplace({m.e, m.k});
        it->second.add_term(m.pe, m.pa, kapitza::rat_from_string(m.coeff));
        (void)inserted;
    }
    return out;
}

} // namespace testsupport
