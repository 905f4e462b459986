#pragma once

#include "kapitza/errors.hpp"
#include "kapitza/numeric.hpp"
#include "kapitza/potential.hpp"
#include "kapitza/series.hpp"
#include "kapitza/wavefn.hpp"

#include <cmath>
#include <numbers>

namespace kapitza {

// ---------------------------------------------------------------------------
// Two-level reduction of a deep double well. The perturbative levels of the
// two wells are coupled by the exponentially small barrier matrix element
//
//   H = ( E_0   -gamma )
//       ( -gamma  E_pi )
//
// and gamma follows the barrier WKB estimate with a Furry correction for
// small quantum numbers.
// ---------------------------------------------------------------------------

// Barrier action at energy E between the right turning point of the zero
// well and the left turning point of the pi well. The square-root endpoint
// singularities are removed by the substitution phi = turning + s^2.
inline double wkb_action_numeric(const PendulumParams& p, double E) {
    const double lo = turning_points(p, E, Well::zero)[1];
    const double hi = turning_points(p, E, Well::pi)[0];
    if (!(lo < hi))
        throw EnergyOutOfRange("wkb_action_numeric: turning points crossed");
    const double mid = 0.5 * (lo + hi);
    auto momentum = [&](double phi) {
        return std::sqrt(2.0 * std::max(eval_potential(p, phi) - E, 0.0));
    };
    auto left = integrate_adaptive<double>(
        [&](double s) { return 2.0 * s * momentum(lo + s * s); }, 0.0,
        std::sqrt(mid - lo), 1e-10);
    auto right = integrate_adaptive<double>(
        [&](double s) { return 2.0 * s * momentum(hi - s * s); }, 0.0,
        std::sqrt(hi - mid), 1e-10);
    return left.value + right.value;
}

enum class ActionVariant {
    leading,     // 2 sqrt(2) B^{1/2}; keeps the two-level matrix Hermitian
    plus_branch, // action at the zero-well level
    minus_branch,
    symmetrized  // mean of the two branches
};

// Truncated closed forms of the barrier action.
inline double wkb_action_series(const PendulumParams& p, int mu,
                                ActionVariant variant = ActionVariant::leading) {
    if (!(p.B > 0.0)) throw NonPositiveInput("wkb_action_series: B <= 0");
    const double mt = mu + 0.5;
    const double rb = std::sqrt(p.B);
    const double s0 = 2.0 * std::sqrt(2.0) * rb;
    if (variant == ActionVariant::leading) return s0;
    const double splus =
        s0 - (9.0 * mt - 2.0 * mt * std::log(mt * mt / (4.0 * p.B))) /
                 (2.0 * std::sqrt(2.0));
    switch (variant) {
        case ActionVariant::plus_branch:
            return splus;
        case ActionVariant::minus_branch:
            return splus - 3.0 * p.A / (2.0 * std::sqrt(2.0) * rb);
        case ActionVariant::symmetrized:
            return splus - 3.0 * p.A / (4.0 * std::sqrt(2.0) * rb);
        default:
            return s0;
    }
}

// Furry factor sqrt(2 pi) mt^mt e^{-mt} / mu!, about 1.075 at mu = 0 and
// approaching 1 from above for large mu.
inline double furry_factor(int mu) {
    if (mu < 0) throw NonPositiveInput("furry_factor: mu < 0");
    const double mt = mu + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(mt, mt) *
           std::exp(-mt) / factorial_double(mu);
}

struct CouplingOptions {
    ActionVariant action = ActionVariant::leading;
    int energy_order = 5; // truncation for the well levels in the report
};

// Well-to-well coupling. The factor 2 counts the clockwise and
// anticlockwise paths around the circle.
inline double tunneling_coupling(const PendulumParams& p, int mu,
                                 const CouplingOptions& opt = {}) {
    if (!(p.B > 0.0)) throw NonPositiveInput("tunneling_coupling: B <= 0");
    if (std::abs(p.A) >= 2.0 * p.B)
        throw ParameterDomain("tunneling_coupling: needs |A| < 2B");
    const double ratio = p.A / (2.0 * p.B);
    const double angular =
        2.0 * std::sqrt(p.B) * std::pow(1.0 - ratio * ratio, 0.25);
    const double S = wkb_action_series(p, mu, opt.action);
    return 2.0 * furry_factor(mu) * angular / std::numbers::pi * std::exp(-S);
}

struct TwoLevelResult {
    double E0 = 0.0;
    double Epi = 0.0;
    double gamma = 0.0;
    double E_plus = 0.0;  // antisymmetric-like, higher level
    double E_minus = 0.0; // lower level
    double delta = 0.0;   // broadened bias sqrt(bias^2 + 4 gamma^2)
    double theta = 0.0;   // mixing angle, clamped to [0, pi/4]
    double S_plus = 0.0;
    double S_minus = 0.0;
};

inline TwoLevelResult two_level_solve(double E0, double Epi, double gamma) {
    TwoLevelResult r;
    r.E0 = E0;
    r.Epi = Epi;
    r.gamma = gamma;
    const double bias = Epi - E0;
    r.delta = std::sqrt(bias * bias + 4.0 * gamma * gamma);
    const double mean = 0.5 * (E0 + Epi);
    r.E_plus = mean + 0.5 * r.delta;
    r.E_minus = mean - 0.5 * r.delta;
    // tan(2 theta) = 2 gamma / |bias|; the absolute value keeps theta in
    // [0, pi/4] when the deeper well is the one at pi
    r.theta = 0.5 * std::atan2(2.0 * std::abs(gamma), std::abs(bias));
    return r;
}

struct SplittingReport {
    PendulumParams params;
    int mu = 0;
    ActionVariant action = ActionVariant::leading;
    int energy_order = 5;
    TwoLevelResult levels;
    double action_value = 0.0;  // the S used inside gamma
    double furry = 0.0;
    double angular_factor = 0.0;
    bool deep_well = true;
};

inline SplittingReport splitting_report(const PendulumParams& p, int mu,
                                        const CouplingOptions& opt = {}) {
    SplittingReport rep;
    rep.params = p;
    rep.mu = mu;
    rep.action = opt.action;
    rep.energy_order = opt.energy_order;
    const WellEnergy e0 = oscillatory_energy_0(p, mu, opt.energy_order);
    const WellEnergy epi = oscillatory_energy_pi(p, mu, opt.energy_order);
    const double gamma = tunneling_coupling(p, mu, opt);
    rep.levels = two_level_solve(e0.value, epi.value, gamma);
    rep.levels.S_plus = wkb_action_series(p, mu, ActionVariant::plus_branch);
    rep.levels.S_minus = wkb_action_series(p, mu, ActionVariant::minus_branch);
    rep.action_value = wkb_action_series(p, mu, opt.action);
    rep.furry = furry_factor(mu);
    const double ratio = p.A / (2.0 * p.B);
    rep.angular_factor =
        2.0 * std::sqrt(p.B) * std::pow(1.0 - ratio * ratio, 0.25);
    rep.deep_well = e0.deep_well && epi.deep_well;
    return rep;
}

} // namespace kapitza
