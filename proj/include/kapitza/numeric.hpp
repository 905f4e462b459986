#pragma once

#include "kapitza/errors.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace kapitza {

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 adaptive quadrature over a real parameter. The value
// type may be double or std::complex<double>; paths through the complex
// plane are handled by the caller folding the Jacobian into the integrand.
// ---------------------------------------------------------------------------

namespace detail {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard double precision values.
inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T, typename F>
void gk15(F&& f, double a, double b, T& kronrod, double& err, double& resabs) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    T resk = gk_wk[7] * fc;
    T resg = gk_wg[3] * fc;
    double reska = gk_wk[7] * std::abs(fc);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        T fl = f(c - dx);
        T fr = f(c + dx);
        resk = resk + gk_wk[i] * (fl + fr);
        reska += gk_wk[i] * (std::abs(fl) + std::abs(fr));
        if (i % 2 == 1) resg = resg + gk_wg[i / 2] * (fl + fr);
    }
    kronrod = h * resk;
    err = std::abs(h * (resk - resg));
    resabs = h * reska;
}

} // namespace detail

template <typename T>
struct QuadResult {
    T value{};
    double error = 0.0;
    bool converged = false;
};

// Bisect until every segment contributes less than its share of abs_tol, or
// until the estimate reaches the roundoff floor of the segment's absolute
// mass, where further splitting only chases noise.
template <typename T, typename F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                 int max_depth = 48) {
    struct Seg {
        double a, b;
        int depth;
    };
    std::vector<Seg> stack{{a, b, 0}};
    QuadResult<T> out;
    out.converged = true;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        T val;
        double err, resabs;
        detail::gk15<T>(f, s.a, s.b, val, err, resabs);
        const double local_tol =
            std::max(abs_tol * (s.b - s.a) / (b - a),
                     50.0 * std::numeric_limits<double>::epsilon() * resabs);
        if (err <= local_tol || s.depth >= max_depth) {
            out.value = out.value + val;
            out.error += err;
            if (err > local_tol) out.converged = false;
        } else {
            const double m = 0.5 * (s.a + s.b);
            stack.push_back({s.a, m, s.depth + 1});
            stack.push_back({m, s.b, s.depth + 1});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with standard step control. Fixed-size real state.
// ---------------------------------------------------------------------------

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
using OdeRhs = std::function<void(double, const OdeState<N>&, OdeState<N>&)>;

template <std::size_t N>
OdeState<N> integrate_ode(const OdeRhs<N>& rhs, double t0, double t1,
                          OdeState<N> y, double rtol = 1e-12,
                          double atol = 1e-14) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::max(1e-6, std::abs(t1 - t0) / 100.0);
    OdeState<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
    rhs(t, y, k1);
    long steps = 0;
    const long max_steps = 2000000;
    while (dir * (t1 - t) > 0) {
        if (++steps > max_steps)
            throw IntegratorFailure("integrate_ode: step budget exhausted");
        if (dir * (t + h - t1) > 0) h = t1 - t;

        auto stage = [&](const std::array<double, 6>& a, int na,
                         OdeState<N>& out) {
            const OdeState<N>* ks[6] = {&k1, &k2, &k3, &k4, &k5, &k6};
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (int j = 0; j < na; ++j) acc += a[j] * (*ks[j])[i];
                out[i] = y[i] + h * acc;
            }
        };
        stage({a21}, 1, ytmp);
        rhs(t + c2 * h, ytmp, k2);
        stage({a31, a32}, 2, ytmp);
        rhs(t + c3 * h, ytmp, k3);
        stage({a41, a42, a43}, 3, ytmp);
        rhs(t + c4 * h, ytmp, k4);
        stage({a51, a52, a53, a54}, 4, ytmp);
        rhs(t + c5 * h, ytmp, k5);
        stage({a61, a62, a63, a64, a65}, 5, ytmp);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);
        double err_norm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * k7[i]);
            const double sc =
                atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = yerr[i] / sc;
            err_norm += r * r;
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(N));
        if (err_norm <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7; // first-same-as-last
        }
        double fac = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
            throw IntegratorFailure("integrate_ode: step size underflow");
    }
    return y;
}

// ---------------------------------------------------------------------------
// Small root/quadrature helpers.
// ---------------------------------------------------------------------------

// Bisection on a bracketing interval. Requires f(lo) and f(hi) of opposite
// sign; tolerance is absolute in the argument.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-12) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::invalid_argument("bisect: root not bracketed");
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Trapezoid rule over tabulated samples on an arbitrary monotone grid.
inline double trapezoid(const std::vector<double>& x,
                        const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        acc += 0.5 * (x[i + 1] - x[i]) * (y[i + 1] + y[i]);
    return acc;
}

} // namespace kapitza
