#pragma once

#include "kapitza/errors.hpp"
#include "kapitza/numeric.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace kapitza {

// Dimensionless parameters of u(phi) = -A cos(phi) + B sin^2(phi).
// A tilts the two wells against each other, B sets the barrier scale.
struct PendulumParams {
    double A = 0.0;
    double B = 0.0;
};

// Raw laboratory quantities for a driven pendulum of length L whose pivot
// oscillates vertically with amplitude z0 and frequency omega.
struct PhysicalParams {
    double mass = 0.0;
    double length = 0.0;
    double omega0 = 0.0; // gravitational frequency sqrt(g/L)
    double omega = 0.0;  // drive frequency
    double z0 = 0.0;     // drive amplitude
    double hbar = 0.0;
};

// Coefficients of psi''(x) + (theta0 + theta1 cos 2x + theta2 cos 4x) psi = 0
// reached by the half-angle substitution x = phi/2.
struct WhittakerHillParams {
    double theta0 = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
};

enum class Well { zero, pi };

inline double eval_potential(const PendulumParams& p, double phi) {
    const double s = std::sin(phi);
    return -p.A * std::cos(phi) + p.B * s * s;
}

// Two interior maxima exist iff |A| < 2B. Negative A swaps the roles of the
// two wells; A = 0 leaves them degenerate.
inline bool is_double_well(const PendulumParams& p) {
    return p.B > 0.0 && std::abs(p.A) < 2.0 * p.B;
}

// A state with index mu is treated as well-confined when mu + 1/2 does not
// exceed eps * sqrt(B).
inline bool is_deep_well(const PendulumParams& p, int mu, double eps = 0.1) {
    return p.B > 0.0 && (mu + 0.5) <= eps * std::sqrt(p.B);
}

struct SummitGeometry {
    std::array<double, 2> well_angles;  // {0, pi}
    double summit_angle = 0.0;          // in (0, pi); the mirror at -angle
    double summit_height = 0.0;         // exactly B + A^2/(4B)
    double depth_zero = 0.0;            // summit_height - u(0)
    double depth_pi = 0.0;              // summit_height - u(pi)
};

inline SummitGeometry saddle_summit_geometry(const PendulumParams& p) {
    if (!is_double_well(p))
        throw NotDoubleWell("saddle_summit_geometry: |A| >= 2B");
    SummitGeometry g;
    g.well_angles = {0.0, std::numbers::pi};
    g.summit_angle = std::acos(-p.A / (2.0 * p.B));
    g.summit_height = p.B + p.A * p.A / (4.0 * p.B);
    g.depth_zero = g.summit_height + p.A;
    g.depth_pi = g.summit_height - p.A;
    return g;
}

// Classical turning points of one well at energy E, as a pair bracketing the
// minimum. The potential is strictly monotone between minimum and summit, so
// plain bisection to 1e-12 suffices.
inline std::array<double, 2> turning_points(const PendulumParams& p, double E,
                                            Well well) {
    const SummitGeometry g = saddle_summit_geometry(p);
    if (well == Well::pi) {
        const PendulumParams q{-p.A, p.B};
        const auto t = turning_points(q, E, Well::zero);
        return {std::numbers::pi - t[1], std::numbers::pi + t[1]};
    }
    const double bottom = eval_potential(p, 0.0);
    if (!(E > bottom) || !(E < g.summit_height))
        throw EnergyOutOfRange("turning_points: E outside (well bottom, summit)");
    const double phi_t = bisect(
        [&](double phi) { return eval_potential(p, phi) - E; }, 0.0,
        g.summit_angle, 1e-12);
    return {-phi_t, phi_t};
}

inline WhittakerHillParams to_whittaker_hill(const PendulumParams& p,
                                             double energy) {
    return {4.0 * energy - 2.0 * p.B, 4.0 * p.A, 2.0 * p.B};
}

struct FromWhittakerHill {
    PendulumParams params;
    double energy = 0.0;
};

inline FromWhittakerHill from_whittaker_hill(const WhittakerHillParams& w) {
    FromWhittakerHill r;
    r.params.A = w.theta1 / 4.0;
    r.params.B = w.theta2 / 2.0;
    r.energy = (w.theta0 + w.theta2) / 4.0;
    return r;
}

struct ReducedParams {
    PendulumParams params;
    double critical_frequency = 0.0; // drive frequency where B/A = 1/2
};

inline ReducedParams from_physical(const PhysicalParams& ph) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw NonPositiveInput(std::string("from_physical: ") + name);
    };
    positive(ph.mass, "mass");
    positive(ph.length, "length");
    positive(ph.omega0, "omega0");
    positive(ph.omega, "omega");
    positive(ph.z0, "z0");
    positive(ph.hbar, "hbar");
    const double m = ph.mass, L = ph.length, hb = ph.hbar;
    ReducedParams r;
    r.params.A = 2.0 * m * m * ph.omega0 * ph.omega0 * L * L * L * L / (hb * hb);
    r.params.B =
        m * m * ph.omega * ph.omega * ph.z0 * ph.z0 * L * L / (2.0 * hb * hb);
    r.critical_frequency = std::sqrt(2.0) * L * ph.omega0 / ph.z0;
    return r;
}

} // namespace kapitza
