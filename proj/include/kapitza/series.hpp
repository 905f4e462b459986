#pragma once

#include "kapitza/contour.hpp"
#include "kapitza/errors.hpp"
#include "kapitza/numeric.hpp"
#include "kapitza/potential.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

namespace kapitza {

// The well energy table in half powers of 1/B is produced by reverting the
// exponent series; see invert_to_energy. One shared name for both users.
using HalfPowerSeries = EnergySeries;

// Cached exact tables, keyed by truncation order.
inline const HalfPowerSeries& energy_series_table(int order) {
    static std::map<int, HalfPowerSeries> cache;
    static std::mutex guard;
    std::lock_guard<std::mutex> lock(guard);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, invert_to_energy(order)).first;
    return it->second;
}

struct WellEnergy {
    double value = 0.0;
    double first_omitted = 0.0; // magnitude of the first dropped term
    bool deep_well = true;      // false marks an advisory-quality result
};

// Oscillator levels of the well at phi = 0:
//   E = sum_{k <= order} e_k(mu + 1/2, A) B^{(1-k)/2}.
// Coefficients are evaluated in exact rational arithmetic first.
inline WellEnergy oscillatory_energy_0(const PendulumParams& p, int mu,
                                       int order = 5) {
    if (!(p.B > 0.0)) throw NonPositiveInput("oscillatory_energy_0: B <= 0");
    if (mu < 0) throw NonPositiveInput("oscillatory_energy_0: mu < 0");
    if (order < 0) throw NonPositiveInput("oscillatory_energy_0: order < 0");
    const HalfPowerSeries& tab = energy_series_table(order);
    WellEnergy r;
    r.value = tab.eval(p, mu);
    r.first_omitted = tab.first_omitted(p, mu);
    r.deep_well = is_deep_well(p, mu);
    return r;
}

// Levels of the well at phi = pi are the phi = 0 levels of the reflected
// potential. Reusing the same table keeps the two wells consistent by
// construction.
inline WellEnergy oscillatory_energy_pi(const PendulumParams& p, int mu,
                                        int order = 5) {
    return oscillatory_energy_0({-p.A, p.B}, mu, order);
}

// ---------------------------------------------------------------------------
// Fast rotating states, |nu| well above the barrier scale.
// ---------------------------------------------------------------------------

struct RotatingEnergy {
    double value = 0.0;
    double first_omitted = 0.0;
    bool fast_rotor = true; // false once nu^2 < B
};

inline RotatingEnergy rotating_energy(const PendulumParams& p, double nu,
                                      int order = 2) {
    if (nu == 0.0) throw NonPositiveInput("rotating_energy: nu must be nonzero");
    if (order < 0 || order > 2)
        throw NonPositiveInput("rotating_energy: order outside 0..2");
    const double A = p.A, B = p.B;
    const double n2 = nu * nu;
    const double t1 = (B * B + 2.0 * A * A) / (32.0 * n2);
    const double t2 = (2.0 * B * B - 3.0 * A * A * B + 2.0 * A * A) /
                      (64.0 * n2 * n2);
    RotatingEnergy r;
    r.value = n2 + B / 2.0;
    if (order >= 1) r.value += t1;
    if (order >= 2) r.value += t2;
    if (order == 0) {
        r.first_omitted = std::abs(t1);
    } else if (order == 1) {
        r.first_omitted = std::abs(t2);
    } else {
        r.first_omitted = (t1 != 0.0) ? std::abs(t2 * t2 / t1) : 0.0;
    }
    r.fast_rotor = n2 >= B;
    return r;
}

enum class RotatingBranch { plus, minus, cosine, sine };

enum class Normalization { closed_form, quadrature };

struct RotatingOptions {
    RotatingBranch branch = RotatingBranch::plus;
    int order = 2; // powers of 1/nu kept inside the bracket
    Normalization normalization = Normalization::closed_form;
};

namespace detail {

inline std::complex<double> rotating_bracket(const PendulumParams& p,
                                             double nu, double phi, int sign,
                                             int order) {
    const double A = p.A, B = p.B;
    std::complex<double> acc = 1.0;
    if (order >= 1) {
        const double first =
            (B * std::sin(2.0 * phi) + 4.0 * A * std::sin(phi)) / (8.0 * nu);
        acc += std::complex<double>(0.0, sign * first);
    }
    if (order >= 2) {
        const double second =
            (B * B * std::cos(4.0 * phi) + 8.0 * A * B * std::cos(3.0 * phi) -
             16.0 * (2.0 * B - A * A) * std::cos(2.0 * phi) -
             8.0 * A * (B + 8.0) * std::cos(phi)) /
            (256.0 * nu * nu);
        acc += second;
    }
    return acc;
}

inline std::complex<double> rotating_raw(const PendulumParams& p, double nu,
                                         double phi, int sign, int order) {
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.0, sign * nu * phi));
    return phase * rotating_bracket(p, nu, phi, sign, order);
}

} // namespace detail

// Closed-form prefactor shared by both senses of rotation.
inline double rotating_prefactor(const PendulumParams& p, double nu) {
    const double A = p.A, B = p.B;
    const double n2 = nu * nu;
    return std::sqrt(2.0 * std::numbers::pi) *
           (1.0 - B / (8.0 * n2) +
            (B * B - 8.0 * B + 6.0 * A * A) / (64.0 * n2 * n2));
}

inline std::complex<double> rotating_wavefunction(const PendulumParams& p,
                                                  double nu, double phi,
                                                  const RotatingOptions& opt = {}) {
    if (nu == 0.0)
        throw NonPositiveInput("rotating_wavefunction: nu must be nonzero");
    double norm;
    if (opt.normalization == Normalization::closed_form) {
        norm = rotating_prefactor(p, nu);
    } else {
        // Unit circle norm of one rotating sense, by quadrature.
        auto density = [&](double x) {
            return std::norm(detail::rotating_raw(p, nu, x, +1, opt.order));
        };
        const auto q = integrate_adaptive<double>(density, 0.0,
                                                  2.0 * std::numbers::pi, 1e-12);
        norm = 1.0 / std::sqrt(q.value);
    }
    switch (opt.branch) {
        case RotatingBranch::plus:
            return norm * detail::rotating_raw(p, nu, phi, +1, opt.order);
        case RotatingBranch::minus:
            return norm * detail::rotating_raw(p, nu, phi, -1, opt.order);
        case RotatingBranch::cosine:
            return norm * (detail::rotating_raw(p, nu, phi, +1, opt.order) +
                           detail::rotating_raw(p, nu, phi, -1, opt.order));
        case RotatingBranch::sine:
            return norm * (detail::rotating_raw(p, nu, phi, +1, opt.order) -
                           detail::rotating_raw(p, nu, phi, -1, opt.order));
    }
    return {};
}

// ---------------------------------------------------------------------------
// Reference eigenvalue series for the A = 0 limit after the quarter-turn
// substitution, for cross-checking the chart. h plays the role of B/4 and
// the eigenvalue maps back as E = lambda + B/2.
// ---------------------------------------------------------------------------

enum class MathieuRegime { weak, strong };

struct MathieuReference {
    double value = 0.0;         // weak: a_n = b_n; strong: a_n = b_{n+1}
    double first_omitted = 0.0;
    int n = 0;
    MathieuRegime regime = MathieuRegime::weak;
};

inline MathieuReference mathieu_reference(int n, double h,
                                          MathieuRegime regime) {
    MathieuReference r;
    r.n = n;
    r.regime = regime;
    if (regime == MathieuRegime::weak) {
        // Degenerate denominators make the printed form useless at n <= 1,
        // and its h^4 term has a second pole at n = 2.
        if (n <= 1)
            throw WeakSeriesSingular("mathieu_reference: weak series needs n >= 2");
        const double n2 = static_cast<double>(n) * n;
        r.value = n2 + h * h / (2.0 * (n2 - 1.0));
        if (n == 2) {
            r.first_omitted = std::pow(h, 4);
        } else {
            const double t4 = (5.0 * n2 + 7.0) * std::pow(h, 4) /
                              (32.0 * std::pow(n2 - 1.0, 3) * (n2 - 4.0));
            r.value += t4;
            const double t2 = h * h / (2.0 * (n2 - 1.0));
            r.first_omitted = (t2 != 0.0) ? std::abs(t4 * t4 / t2) : 0.0;
        }
    } else {
        if (!(h > 0.0))
            throw NonPositiveInput("mathieu_reference: strong regime needs h > 0");
        if (n < 0)
            throw NonPositiveInput("mathieu_reference: n < 0");
        const double s = 2.0 * n + 1.0;
        r.value = -2.0 * h + 2.0 * s * std::sqrt(h) - (s * s + 1.0) / 8.0;
        r.first_omitted = (s * s * s + 3.0 * s) / (128.0 * std::sqrt(h));
    }
    return r;
}

} // namespace kapitza
