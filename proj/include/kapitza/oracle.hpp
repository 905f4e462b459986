#pragma once

#include "kapitza/errors.hpp"
#include "kapitza/numeric.hpp"
#include "kapitza/potential.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace kapitza {

// ---------------------------------------------------------------------------
// Banded symmetric eigenproblems via LAPACK dsbev. Storage is lower-band
// column major: element (i, j) with i >= j sits at ab[j * (kd + 1) + (i - j)].
// ---------------------------------------------------------------------------

struct BandedMatrix {
    int n = 0;
    int kd = 0;
    std::vector<double> ab;

    BandedMatrix(int n_, int kd_) : n(n_), kd(kd_) {
        ab.assign(static_cast<std::size_t>(n) * (kd + 1), 0.0);
    }

    double& at(int i, int j) { // requires j <= i <= j + kd
        return ab[static_cast<std::size_t>(j) * (kd + 1) + (i - j)];
    }

    double get(int i, int j) const {
        if (i < j) std::swap(i, j);
        if (i - j > kd) return 0.0;
        return ab[static_cast<std::size_t>(j) * (kd + 1) + (i - j)];
    }
};

struct BandedEigen {
    std::vector<double> values;              // ascending
    std::vector<std::vector<double>> vectors; // per state, length n
};

inline BandedEigen solve_banded(const BandedMatrix& m, bool want_vectors) {
    BandedEigen r;
    r.values.assign(static_cast<std::size_t>(m.n), 0.0);
    std::vector<double> ab = m.ab; // dsbev destroys its input
    std::vector<double> z;
    if (want_vectors) z.assign(static_cast<std::size_t>(m.n) * m.n, 0.0);
    const lapack_int info = LAPACKE_dsbev(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', m.n, m.kd, ab.data(),
        m.kd + 1, r.values.data(), want_vectors ? z.data() : nullptr,
        want_vectors ? m.n : 1);
    if (info != 0) throw Error("solve_banded: dsbev failed");
    if (want_vectors) {
        r.vectors.resize(static_cast<std::size_t>(m.n));
        for (int s = 0; s < m.n; ++s) {
            auto& v = r.vectors[static_cast<std::size_t>(s)];
            v.assign(z.begin() + static_cast<std::ptrdiff_t>(s) * m.n,
                     z.begin() + static_cast<std::ptrdiff_t>(s + 1) * m.n);
            // deterministic sign: largest entry positive
            int imax = 0;
            for (int i = 1; i < m.n; ++i)
                if (std::abs(v[static_cast<std::size_t>(i)]) >
                    std::abs(v[static_cast<std::size_t>(imax)]))
                    imax = i;
            if (v[static_cast<std::size_t>(imax)] < 0.0)
                for (double& x : v) x = -x;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Plane-wave matrix in the basis exp(i (k + nu) phi), k = -K..K. Writing
// u = B/2 - A cos(phi) - (B/2) cos(2 phi) gives a pentadiagonal real
// symmetric matrix: diagonal (k + nu)^2 + B/2, first band -A/2, second -B/4.
// ---------------------------------------------------------------------------

struct FourierMatrixSpec {
    PendulumParams params;
    double nu = 0.0; // quasi-angular-momentum offset
    int K = 0;       // 0 means choose automatically
};

inline int auto_fourier_K(double B) {
    const int k = static_cast<int>(std::ceil(3.0 * std::sqrt(std::max(B, 0.0)))) + 24;
    return std::max(k, 48);
}

inline BandedMatrix build_fourier_matrix(const FourierMatrixSpec& spec) {
    const int K = spec.K > 0 ? spec.K : auto_fourier_K(spec.params.B);
    const int n = 2 * K + 1;
    BandedMatrix m(n, 2);
    const double A = spec.params.A, B = spec.params.B;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(i - K) + spec.nu;
        m.at(i, i) = k * k + B / 2.0;
        if (i + 1 < n) m.at(i + 1, i) = -A / 2.0;
        if (i + 2 < n) m.at(i + 2, i) = -B / 4.0;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Real parity-adapted bases. The potential is even in phi, so cosine and
// sine families decouple exactly, in both the single-valued (periodic) and
// double-valued (antiperiodic) boundary sectors.
// ---------------------------------------------------------------------------

enum class ParityClass {
    cos_periodic,    // {1/sqrt(2), cos(phi), cos(2 phi), ...}
    sin_periodic,    // {sin(phi), sin(2 phi), ...}
    cos_antiperiodic, // {cos(phi/2), cos(3 phi/2), ...}
    sin_antiperiodic  // {sin(phi/2), sin(3 phi/2), ...}
};

enum class Sector { periodic, antiperiodic };

inline BandedMatrix build_class_matrix(const PendulumParams& p,
                                       ParityClass cls, int K) {
    const double c0 = p.B / 2.0, c1 = -p.A, c2 = -p.B / 2.0;
    switch (cls) {
        case ParityClass::cos_periodic: {
            BandedMatrix m(K + 1, 2);
            for (int j = 0; j <= K; ++j) m.at(j, j) = double(j) * j + c0;
            if (K >= 1) m.at(1, 1) += c2 / 2.0;
            for (int j = 0; j < K; ++j) m.at(j + 1, j) += c1 / 2.0;
            for (int j = 0; j + 2 <= K; ++j) m.at(j + 2, j) += c2 / 2.0;
            // constant mode carries the 1/sqrt(2) normalization
            if (K >= 1) m.at(1, 0) = c1 / std::sqrt(2.0);
            if (K >= 2) m.at(2, 0) = c2 / std::sqrt(2.0);
            return m;
        }
        case ParityClass::sin_periodic: {
            BandedMatrix m(K, 2);
            for (int i = 0; i < K; ++i) {
                const double j = i + 1;
                m.at(i, i) = j * j + c0;
            }
            m.at(0, 0) -= c2 / 2.0;
            for (int i = 0; i + 1 < K; ++i) m.at(i + 1, i) += c1 / 2.0;
            for (int i = 0; i + 2 < K; ++i) m.at(i + 2, i) += c2 / 2.0;
            return m;
        }
        case ParityClass::cos_antiperiodic: {
            BandedMatrix m(K + 1, 2);
            for (int j = 0; j <= K; ++j)
                m.at(j, j) = (j + 0.5) * (j + 0.5) + c0;
            m.at(0, 0) += c1 / 2.0;
            for (int j = 0; j < K; ++j) m.at(j + 1, j) += c1 / 2.0;
            if (K >= 1) m.at(1, 0) += c2 / 2.0;
            for (int j = 0; j + 2 <= K; ++j) m.at(j + 2, j) += c2 / 2.0;
            return m;
        }
        case ParityClass::sin_antiperiodic: {
            BandedMatrix m(K + 1, 2);
            for (int j = 0; j <= K; ++j)
                m.at(j, j) = (j + 0.5) * (j + 0.5) + c0;
            m.at(0, 0) -= c1 / 2.0;
            for (int j = 0; j < K; ++j) m.at(j + 1, j) += c1 / 2.0;
            if (K >= 1) m.at(1, 0) -= c2 / 2.0;
            for (int j = 0; j + 2 <= K; ++j) m.at(j + 2, j) += c2 / 2.0;
            return m;
        }
    }
    throw Error("build_class_matrix: unreachable");
}

inline double class_basis_eval(ParityClass cls, int j, double phi) {
    switch (cls) {
        case ParityClass::cos_periodic:
            return j == 0 ? 1.0 / std::sqrt(2.0) : std::cos(j * phi);
        case ParityClass::sin_periodic:
            return std::sin((j + 1) * phi);
        case ParityClass::cos_antiperiodic:
            return std::cos((j + 0.5) * phi);
        case ParityClass::sin_antiperiodic:
            return std::sin((j + 0.5) * phi);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Spectra with per-eigenvalue convergence estimates from a K vs K + 8 rerun.
// An unconverged entry is flagged, never thrown.
// ---------------------------------------------------------------------------

struct SpectralResult {
    Sector sector = Sector::periodic;
    double nu = 0.0;
    int K = 0;
    std::vector<double> energies;
    std::vector<std::vector<double>> coefficients;
    std::vector<ParityClass> classes; // empty for plane-wave solves
    std::vector<double> convergence;  // |lambda(K) - lambda(K+8)|
    bool all_converged = true;
};

inline constexpr double eigen_convergence_tol = 1e-10;

namespace detail {

struct ClassState {
    double energy;
    ParityClass cls;
    std::vector<double> coeff;
};

inline std::vector<ClassState> solve_class(const PendulumParams& p,
                                           ParityClass cls, int K,
                                           bool want_vectors) {
    const auto eig = solve_banded(build_class_matrix(p, cls, K), want_vectors);
    std::vector<ClassState> out;
    out.reserve(eig.values.size());
    for (std::size_t i = 0; i < eig.values.size(); ++i)
        out.push_back({eig.values[i], cls,
                       want_vectors ? eig.vectors[i] : std::vector<double>{}});
    return out;
}

} // namespace detail

// Physical (single valued) or antiperiodic spectrum, merged over the two
// parity classes of the sector, lowest nev states.
inline SpectralResult sector_spectrum(const PendulumParams& p, Sector sector,
                                      int nev, int K = 0) {
    const int K0 = K > 0 ? K : auto_fourier_K(p.B);
    const ParityClass ca = sector == Sector::periodic
                               ? ParityClass::cos_periodic
                               : ParityClass::cos_antiperiodic;
    const ParityClass cb = sector == Sector::periodic
                               ? ParityClass::sin_periodic
                               : ParityClass::sin_antiperiodic;
    auto merged = detail::solve_class(p, ca, K0, true);
    auto sb = detail::solve_class(p, cb, K0, true);
    merged.insert(merged.end(), sb.begin(), sb.end());
    std::stable_sort(merged.begin(), merged.end(),
                     [](const auto& x, const auto& y) {
                         return x.energy < y.energy;
                     });

    auto refa = detail::solve_class(p, ca, K0 + 8, false);
    auto refb = detail::solve_class(p, cb, K0 + 8, false);
    refa.insert(refa.end(), refb.begin(), refb.end());
    std::stable_sort(refa.begin(), refa.end(),
                     [](const auto& x, const auto& y) {
                         return x.energy < y.energy;
                     });

    SpectralResult r;
    r.sector = sector;
    r.nu = sector == Sector::periodic ? 0.0 : 0.5;
    r.K = K0;
    const int count = std::min<int>(nev, static_cast<int>(merged.size()));
    for (int i = 0; i < count; ++i) {
        const auto& st = merged[static_cast<std::size_t>(i)];
        r.energies.push_back(st.energy);
        r.coefficients.push_back(st.coeff);
        r.classes.push_back(st.cls);
        const double conv =
            std::abs(st.energy - refa[static_cast<std::size_t>(i)].energy);
        r.convergence.push_back(conv);
        if (conv > eigen_convergence_tol) r.all_converged = false;
    }
    return r;
}

// Plane-wave solve at arbitrary real nu offset. Coefficients refer to the
// basis exp(i (k + nu) phi) and the matrix is real by construction.
inline SpectralResult fourier_spectrum(const PendulumParams& p, double nu,
                                       int nev, int K = 0) {
    FourierMatrixSpec spec{p, nu, K};
    const int K0 = spec.K > 0 ? spec.K : auto_fourier_K(p.B);
    spec.K = K0;
    auto eig = solve_banded(build_fourier_matrix(spec), true);
    spec.K = K0 + 8;
    auto ref = solve_banded(build_fourier_matrix(spec), false);

    SpectralResult r;
    r.sector = Sector::periodic;
    r.nu = nu;
    r.K = K0;
    const int count = std::min<int>(nev, static_cast<int>(eig.values.size()));
    for (int i = 0; i < count; ++i) {
        r.energies.push_back(eig.values[static_cast<std::size_t>(i)]);
        r.coefficients.push_back(eig.vectors[static_cast<std::size_t>(i)]);
        // the K and K+8 bases differ by 8 leading rows; compare sorted values
        const double conv = std::abs(eig.values[static_cast<std::size_t>(i)] -
                                     ref.values[static_cast<std::size_t>(i)]);
        r.convergence.push_back(conv);
        if (conv > eigen_convergence_tol) r.all_converged = false;
    }
    return r;
}

// Sample one state of a parity-class solve and normalize so the trapezoid
// rule over the supplied grid gives unit probability.
inline std::vector<double> eigenfunction_grid(const SpectralResult& res,
                                              int index,
                                              const std::vector<double>& grid) {
    if (res.classes.empty())
        throw Error("eigenfunction_grid: spectrum lacks parity class data");
    if (index < 0 || index >= static_cast<int>(res.energies.size()))
        throw Error("eigenfunction_grid: index out of range");
    const auto& coeff = res.coefficients[static_cast<std::size_t>(index)];
    const ParityClass cls = res.classes[static_cast<std::size_t>(index)];
    std::vector<double> psi(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (std::size_t j = 0; j < coeff.size(); ++j)
            acc += coeff[j] * class_basis_eval(cls, static_cast<int>(j), grid[g]);
        psi[g] = acc;
    }
    std::vector<double> density(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) density[g] = psi[g] * psi[g];
    const double nrm = trapezoid(grid, density);
    if (!(nrm > 0.0)) throw Error("eigenfunction_grid: degenerate norm");
    const double s = 1.0 / std::sqrt(nrm);
    for (double& v : psi) v *= s;
    return psi;
}

// Evaluate one state as a smooth callable (unnormalized).
inline std::function<double(double)> eigenfunction_callable(
    const SpectralResult& res, int index) {
    if (res.classes.empty())
        throw Error("eigenfunction_callable: spectrum lacks parity class data");
    const auto coeff = res.coefficients[static_cast<std::size_t>(index)];
    const ParityClass cls = res.classes[static_cast<std::size_t>(index)];
    return [coeff, cls](double phi) {
        double acc = 0.0;
        for (std::size_t j = 0; j < coeff.size(); ++j)
            acc += coeff[j] * class_basis_eval(cls, static_cast<int>(j), phi);
        return acc;
    };
}

// ---------------------------------------------------------------------------
// Band edges. For A = 0 the potential period halves and the edge problem
// decouples further by harmonic parity inside the periodic sector; the
// labels then match the classical (a_n, b_n) convention of the quarter-turn
// reference problem. For A != 0 edges alternate between the periodic and
// antiperiodic sectors and are labeled by counting.
// ---------------------------------------------------------------------------

struct BandEdges {
    std::vector<double> a; // a[n], n = 0..n_max
    std::vector<double> b; // b[n], n = 1..n_max; b[0] is NaN by convention
};

namespace detail {

// Extract the stride-2 submatrix of a kd = 2 banded matrix starting at
// offset 0 or 1. Valid because odd and even indices decouple when the first
// band vanishes.
inline BandedMatrix stride2_submatrix(const BandedMatrix& m, int start) {
    const int n = (m.n - start + 1) / 2;
    BandedMatrix s(n, 1);
    for (int i = 0; i < n; ++i) {
        s.at(i, i) = m.get(start + 2 * i, start + 2 * i);
        if (i + 1 < n) s.at(i + 1, i) = m.get(start + 2 * (i + 1), start + 2 * i);
    }
    return s;
}

} // namespace detail

inline BandEdges band_edges(const PendulumParams& p, int n_max, int K = 0) {
    if (!(p.B > 0.0)) throw NonPositiveInput("band_edges: B <= 0");
    const int K0 = K > 0 ? K : auto_fourier_K(p.B);
    BandEdges out;
    out.a.assign(static_cast<std::size_t>(n_max) + 1,
                 std::numeric_limits<double>::quiet_NaN());
    out.b.assign(static_cast<std::size_t>(n_max) + 1,
                 std::numeric_limits<double>::quiet_NaN());

    if (p.A == 0.0) {
        const auto mc = build_class_matrix(p, ParityClass::cos_periodic, K0);
        const auto ms = build_class_matrix(p, ParityClass::sin_periodic, K0);
        const auto cosE = solve_banded(detail::stride2_submatrix(mc, 0), false);
        const auto cosO = solve_banded(detail::stride2_submatrix(mc, 1), false);
        const auto sinO = solve_banded(detail::stride2_submatrix(ms, 0), false);
        const auto sinE = solve_banded(detail::stride2_submatrix(ms, 1), false);
        for (int n = 0; n <= n_max; ++n) {
            const int m = n / 2;
            if (n % 2 == 0) {
                out.a[static_cast<std::size_t>(n)] =
                    cosE.values[static_cast<std::size_t>(m)];
                if (n >= 2)
                    out.b[static_cast<std::size_t>(n)] =
                        sinE.values[static_cast<std::size_t>(m - 1)];
            } else {
                out.a[static_cast<std::size_t>(n)] =
                    sinO.values[static_cast<std::size_t>(m)];
                out.b[static_cast<std::size_t>(n)] =
                    cosO.values[static_cast<std::size_t>(m)];
            }
        }
        return out;
    }

    const auto per = sector_spectrum(p, Sector::periodic, 2 * n_max + 3, K0);
    const auto anti =
        sector_spectrum(p, Sector::antiperiodic, 2 * n_max + 3, K0);
    out.a[0] = per.energies[0];
    for (int n = 1; n <= n_max; ++n) {
        const auto& list = (n % 2 == 1) ? anti.energies : per.energies;
        out.b[static_cast<std::size_t>(n)] = list[static_cast<std::size_t>(n - 1)];
        out.a[static_cast<std::size_t>(n)] = list[static_cast<std::size_t>(n)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Node counting with an amplitude floor and refinement on demand.
// ---------------------------------------------------------------------------

inline int count_nodes(const std::function<double(double)>& f, double lo,
                       double hi, double floor_frac = 1e-9) {
    int n_samples = 257;
    int prev_count = -1;
    for (int round = 0; round < 14; ++round) {
        std::vector<double> x(static_cast<std::size_t>(n_samples));
        std::vector<double> y(static_cast<std::size_t>(n_samples));
        double amax = 0.0;
        for (int i = 0; i < n_samples; ++i) {
            x[static_cast<std::size_t>(i)] =
                lo + (hi - lo) * i / (n_samples - 1.0);
            y[static_cast<std::size_t>(i)] = f(x[static_cast<std::size_t>(i)]);
            amax = std::max(amax, std::abs(y[static_cast<std::size_t>(i)]));
        }
        const double floor = floor_frac * amax;
        int count = 0;
        int last_sign = 0;
        for (int i = 0; i < n_samples; ++i) {
            const double v = y[static_cast<std::size_t>(i)];
            if (std::abs(v) <= floor) continue; // inside a below-floor run
            const int s = v > 0.0 ? 1 : -1;
            if (last_sign != 0 && s != last_sign) ++count;
            last_sign = s;
        }
        // a below-floor run flanked by equal signs hides an even number of
        // crossings; accept only once two successive grids agree
        if (count == prev_count) return count;
        prev_count = count;
        n_samples = 2 * (n_samples - 1) + 1;
    }
    throw AmbiguousNode("count_nodes: count did not stabilize");
}

// Sample-based variant for externally tabulated data.
inline int count_nodes(const std::vector<double>& y,
                       double floor_frac = 1e-9) {
    double amax = 0.0;
    for (double v : y) amax = std::max(amax, std::abs(v));
    const double floor = floor_frac * amax;
    int count = 0;
    int last_sign = 0;
    for (double v : y) {
        if (std::abs(v) <= floor) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++count;
        last_sign = s;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Characteristic exponent from the 2 pi transfer matrix: integrate two
// fundamental solutions of psi'' = (u - E) psi and read cos(2 pi nu) off the
// half trace.
// ---------------------------------------------------------------------------

struct CharacteristicExponent {
    double half_trace = 0.0;
    std::complex<double> nu{}; // principal value, Re in [0, 1/2]
    bool in_band = false;
};

inline CharacteristicExponent characteristic_exponent(const PendulumParams& p,
                                                      double E) {
    OdeRhs<4> rhs = [&p, E](double phi, const OdeState<4>& y, OdeState<4>& d) {
        const double q = eval_potential(p, phi) - E;
        d[0] = y[1];
        d[1] = q * y[0];
        d[2] = y[3];
        d[3] = q * y[2];
    };
    const OdeState<4> y0{1.0, 0.0, 0.0, 1.0};
    const auto y = integrate_ode<4>(rhs, 0.0, 2.0 * std::numbers::pi, y0,
                                    1e-12, 1e-14);
    CharacteristicExponent r;
    r.half_trace = 0.5 * (y[0] + y[3]);
    const double c = r.half_trace;
    const double twopi = 2.0 * std::numbers::pi;
    if (std::abs(c) <= 1.0) {
        r.in_band = true;
        r.nu = std::acos(c) / twopi;
    } else if (c > 1.0) {
        r.nu = std::complex<double>(0.0, std::acosh(c) / twopi);
    } else {
        r.nu = std::complex<double>(0.5, std::acosh(-c) / twopi);
    }
    return r;
}

// Lift the principal exponent to the branch nearest a caller hint; the
// default hint is the free-rotor estimate.
inline std::complex<double> reconstruct_nu(const PendulumParams& p, double E,
                                           double hint = -1.0) {
    const auto ce = characteristic_exponent(p, E);
    if (hint < 0.0) hint = std::sqrt(std::max(E - p.B / 2.0, 0.25));
    std::complex<double> best = ce.nu;
    double best_d = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= static_cast<int>(hint) + 2; ++n) {
        for (const double s : {1.0, -1.0}) {
            const std::complex<double> cand =
                static_cast<double>(n) + s * ce.nu;
            const double d = std::abs(cand.real() - hint);
            if (cand.real() >= -1e-12 && d < best_d) {
                best_d = d;
                best = cand;
            }
        }
    }
    return best;
}

// Nearest physical level to a target energy, restricted to the parity class
// that a well state of index mu must occupy (even mu -> cosine family).
inline double nearest_level(const PendulumParams& p, int mu, double target,
                            int K = 0) {
    const ParityClass cls = (mu % 2 == 0) ? ParityClass::cos_periodic
                                          : ParityClass::sin_periodic;
    const int K0 = K > 0 ? K : auto_fourier_K(p.B);
    const auto states = detail::solve_class(p, cls, K0, false);
    double best = states.front().energy;
    for (const auto& st : states)
        if (std::abs(st.energy - target) < std::abs(best - target))
            best = st.energy;
    return best;
}

} // namespace kapitza
