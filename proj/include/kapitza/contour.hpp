#pragma once

#include "kapitza/errors.hpp"
#include "kapitza/exact.hpp"
#include "kapitza/numeric.hpp"
#include "kapitza/potential.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace kapitza {

// ---------------------------------------------------------------------------
// Canonical sums  sum c_{e,k}(E, A) cos^e(phi) / sin^k(phi)  with e in {0,1}
// and integer k >= -2. Higher cosine powers are reduced on the fly through
// cos^2 = 1 - sin^2, so each (e, k) slot appears at most once.
// ---------------------------------------------------------------------------

class TrigLaurentSum {
public:
    using Key = std::pair<int, int>; // (e, k)
    using Map = std::map<Key, BiPoly>;

    const Map& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add(int e, int k, const BiPoly& c) {
        if (c.is_zero()) return;
        if (e < 0 || e > 1) throw std::invalid_argument("TrigLaurentSum: e");
        auto it = terms_.find({e, k});
        if (it == terms_.end()) {
            terms_[{e, k}] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    // Product term with cosine-power reduction.
    void add_product(int e, int k, const BiPoly& c) {
        if (c.is_zero()) return;
        if (e <= 1) {
            add(e, k, c);
            return;
        }
        // cos^2 / sin^k = 1/sin^k - 1/sin^(k-2)
        add_product(e - 2, k, c);
        add_product(e - 2, k - 2, -c);
    }

    TrigLaurentSum& operator+=(const TrigLaurentSum& o) {
        for (const auto& [key, c] : o.terms_) add(key.first, key.second, c);
        return *this;
    }

    friend TrigLaurentSum operator*(const TrigLaurentSum& a,
                                    const TrigLaurentSum& b) {
        TrigLaurentSum r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_product(ka.first + kb.first, ka.second + kb.second,
                              ca * cb);
        return r;
    }

    TrigLaurentSum scaled(const Rat& s) const {
        TrigLaurentSum r;
        for (const auto& [key, c] : terms_) r.add(key.first, key.second, s * c);
        return r;
    }

    // Multiplication by 1/sin(phi) shifts every k up by one.
    TrigLaurentSum over_sin() const {
        TrigLaurentSum r;
        for (const auto& [key, c] : terms_) r.add(key.first, key.second + 1, c);
        return r;
    }

    TrigLaurentSum derivative() const {
        TrigLaurentSum r;
        for (const auto& [key, c] : terms_) {
            const auto [e, k] = key;
            if (e == 0) {
                // d/dphi sin^{-k} = -k cos sin^{-k-1}
                r.add_product(1, k + 1, Rat(-k) * c);
            } else {
                // d/dphi cos sin^{-k} = (k-1) sin^{-(k-1)} - k sin^{-(k+1)}
                r.add_product(0, k - 1, Rat(k - 1) * c);
                r.add_product(0, k + 1, Rat(-k) * c);
            }
        }
        return r;
    }

    BiPoly coeff(int e, int k) const {
        auto it = terms_.find({e, k});
        return it == terms_.end() ? BiPoly{} : it->second;
    }

private:
    Map terms_;
};

// Numeric snapshot of a TrigLaurentSum with the table slots already
// evaluated, ready for pointwise evaluation at complex angles.
struct CompiledTrig {
    struct Term {
        int e, k;
        double c;
    };
    std::vector<Term> terms;

    std::complex<double> eval(std::complex<double> phi) const {
        const std::complex<double> s = std::sin(phi);
        const std::complex<double> co = std::cos(phi);
        std::complex<double> acc = 0.0;
        for (const Term& t : terms) {
            std::complex<double> v = t.c;
            if (t.e == 1) v *= co;
            if (t.k > 0) {
                for (int i = 0; i < t.k; ++i) v /= s;
            } else {
                for (int i = 0; i < -t.k; ++i) v *= s;
            }
            acc += v;
        }
        return acc;
    }
};

inline CompiledTrig compile_trig(const TrigLaurentSum& sum, double E,
                                 double A) {
    CompiledTrig c;
    for (const auto& [key, poly] : sum.terms())
        c.terms.push_back({key.first, key.second, poly.eval_double(E, A)});
    return c;
}

// ---------------------------------------------------------------------------
// Logarithmic-derivative orders v_l(phi), l = -1, 0, 1, ..., L, defined by
// psi'/psi = sum_l v_l B^{-l/2}. Substituting into psi'' = (u - E) psi and
// matching powers of B^{1/2} gives
//
//   v_{-1}^2 = sin^2(phi),                    choose v_{-1} = -sin(phi),
//   2 v_{-1} v_0 + v_{-1}' = 0,
//   2 v_{-1} v_{n+1} = [n = 0](-A cos - E) - v_n' - sum_{i+j=n} v_i v_j
//
// with i, j >= 0 in the sum. Coefficient slots are (E, A). The companion
// branch flips the sign of odd orders: v_l^- = (-1)^l v_l^+.
// ---------------------------------------------------------------------------

// Orders v_{-1} .. v_L; index shift: result[l + 1] holds v_l.
inline std::vector<TrigLaurentSum> riccati_orders(int L) {
    std::vector<TrigLaurentSum> v;
    v.reserve(static_cast<std::size_t>(L) + 2);
    TrigLaurentSum vm1;
    vm1.add(0, -1, BiPoly::constant(-1)); // -sin(phi)
    v.push_back(vm1);
    TrigLaurentSum v0;
    v0.add(1, 1, BiPoly::constant(Rat(-1) / 2)); // -cos/(2 sin)
    v.push_back(v0);
    for (int n = 0; n < L; ++n) {
        TrigLaurentSum rhs;
        if (n == 0) {
            rhs.add(1, 0, -BiPoly::var_y()); // -A cos(phi)
            rhs.add(0, 0, -BiPoly::var_x()); // -E
        }
        rhs += v[static_cast<std::size_t>(n) + 1].derivative().scaled(-1);
        for (int i = 0; i <= n; ++i) {
            const int j = n - i;
            TrigLaurentSum prod = v[static_cast<std::size_t>(i) + 1] *
                                  v[static_cast<std::size_t>(j) + 1];
            rhs += prod.scaled(-1);
        }
        // divide by 2 v_{-1} = -2 sin(phi)
        v.push_back(rhs.scaled(Rat(-1) / 2).over_sin());
    }
    return v;
}

// ---------------------------------------------------------------------------
// Residue bookkeeping. With the contour crossing the barrier region once,
// (1/(i pi)) times the path integral of cos^e/sin^k evaluates to
//   e = 0, k odd >= 1 : (k-2)!!/(k-1)!!
//   e = 1, k = 1      : 1
// and zero otherwise (even k by parity, e = 1 with k >= 3 because the
// antiderivative is even, k <= 0 because the segments cancel).
// ---------------------------------------------------------------------------

inline Rat residue_rule(int e, int k) {
    if (e == 0 && k >= 1 && k % 2 == 1) return semifactorial_ratio((k - 1) / 2);
    if (e == 1 && k == 1) return 1;
    return 0;
}

// Exact value of (1/(i pi)) times the path integral of a canonical sum.
inline BiPoly residue_integral(const TrigLaurentSum& sum) {
    BiPoly acc;
    for (const auto& [key, c] : sum.terms()) {
        const Rat r = residue_rule(key.first, key.second);
        if (r != 0) acc += r * c;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exponent series mu(E) = -1/2 + sum_{l odd} c_l(E, A) B^{-l/2}.
// ---------------------------------------------------------------------------

struct ExponentSeries {
    int order = 0;                 // largest l included
    std::map<int, BiPoly> coeff;   // l -> c_l with slots (E, A); even l absent

    double eval(const PendulumParams& p, double E) const {
        double acc = 0.0;
        for (const auto& [l, c] : coeff)
            acc += c.eval_double(E, p.A) * std::pow(p.B, -0.5 * l);
        return acc;
    }
};

inline ExponentSeries exponent_series(int order) {
    ExponentSeries s;
    s.order = order;
    const auto v = riccati_orders(order);
    for (int l = 0; l <= order; ++l) {
        BiPoly c = residue_integral(v[static_cast<std::size_t>(l) + 1]);
        if (!c.is_zero()) s.coeff[l] = c;
        // l = -1 and even l >= 2 integrate to zero; the table stays sparse.
    }
    return s;
}

struct MuOfEnergy {
    double value = 0.0;
    ExponentSeries series;
};

inline MuOfEnergy mu_of_energy(const PendulumParams& p, double E, int order) {
    MuOfEnergy r;
    r.series = exponent_series(order);
    r.value = r.series.eval(p, E);
    return r;
}

// ---------------------------------------------------------------------------
// Reversion of the exponent series: solve mu(E) = mu for E as a series in
// half powers of 1/B,  E = sum_k e_k(mu + 1/2, A) B^{(1-k)/2}.
// ---------------------------------------------------------------------------

namespace detail {

// Truncated Laurent series in t = B^{-1/2} with polynomial coefficients.
// Slots of the coefficients are (mu + 1/2, A).
struct TSeries {
    int tmax = 0;
    std::map<int, BiPoly> c; // power of t -> coefficient

    void add(int pw, const BiPoly& b) {
        if (b.is_zero() || pw > tmax) return;
        auto it = c.find(pw);
        if (it == c.end()) {
            c[pw] = b;
        } else {
            it->second += b;
            if (it->second.is_zero()) c.erase(it);
        }
    }

    TSeries mul(const TSeries& o) const {
        TSeries r;
        r.tmax = tmax;
        for (const auto& [pa, ca] : c)
            for (const auto& [pb, cb] : o.c) {
                if (pa + pb > tmax) continue;
                r.add(pa + pb, ca * cb);
            }
        return r;
    }
};

// Substitute the series for the energy slot of a coefficient polynomial.
inline TSeries subst_energy(const BiPoly& poly, const TSeries& E, int tmax) {
    TSeries acc;
    acc.tmax = tmax;
    const int d = poly.degree_x();
    for (int i = d; i >= 0; --i) {
        acc = acc.mul(E);
        acc.add(0, poly.coeff_x(i));
    }
    return acc;
}

} // namespace detail

struct EnergySeries {
    int order = 0;               // largest k whose term enters eval()
    std::map<int, BiPoly> coeff; // k -> e_k with slots (mu + 1/2, A);
                                 // holds k = 0 .. order + 1 so the first
                                 // omitted term is available exactly

    // Exact rational evaluation of the coefficients before any floating
    // point powers of B are applied.
    double eval(const PendulumParams& p, int mu) const {
        const Rat mt = Rat(2 * mu + 1) / 2;
        const Rat a = Rat(p.A);
        double acc = 0.0;
        for (const auto& [k, c] : coeff) {
            if (k > order) continue;
            acc += to_double(c.eval_rat(mt, a)) * std::pow(p.B, 0.5 * (1 - k));
        }
        return acc;
    }

    // Magnitude of the first omitted term, the standard truncation estimate
    // for an asymptotic series.
    double first_omitted(const PendulumParams& p, int mu) const {
        const Rat mt = Rat(2 * mu + 1) / 2;
        const Rat a = Rat(p.A);
        auto it = coeff.find(order + 1);
        if (it == coeff.end()) return 0.0;
        return std::abs(to_double(it->second.eval_rat(mt, a))) *
               std::pow(p.B, -0.5 * order);
    }
};

inline EnergySeries invert_to_energy(int order) {
    const int lmax = 2 * (order + 1) + 1; // c_l needed through l = 2k+1
    const ExponentSeries mu_series = exponent_series(lmax);

    // c_1 = alpha(A) + beta E with constant beta; isolate E and iterate the
    // resulting fixed point. Each pass extends the valid order by one.
    const auto it_c1 = mu_series.coeff.find(1);
    if (it_c1 == mu_series.coeff.end())
        throw Error("invert_to_energy: missing first exponent coefficient");
    const BiPoly c1 = it_c1->second;
    const BiPoly beta = c1.coeff_x(1);
    const BiPoly alpha = c1.coeff_x(0);
    if (!(beta == BiPoly::constant(Rat(1) / 2)))
        throw Error("invert_to_energy: unexpected linear energy coefficient");

    const int kmax = order + 1;
    const int tmax = kmax - 1;
    detail::TSeries E;
    E.tmax = tmax;
    // Leading term 2 mu~ / t with mu~ in the first slot.
    E.add(-1, Rat(2) * BiPoly::var_x());

    for (int pass = 0; pass <= kmax; ++pass) {
        detail::TSeries rhs;
        rhs.tmax = tmax;
        rhs.add(-1, BiPoly::var_x()); // mu~ / t
        rhs.add(0, -alpha);
        for (const auto& [l, cl] : mu_series.coeff) {
            if (l < 3) continue;
            detail::TSeries term = detail::subst_energy(cl, E, tmax);
            for (const auto& [pw, cb] : term.c) {
                if (pw + l - 1 > tmax) continue;
                rhs.add(pw + l - 1, -cb);
            }
        }
        // divide by beta = 1/2
        detail::TSeries next;
        next.tmax = tmax;
        for (const auto& [pw, cb] : rhs.c) next.add(pw, Rat(2) * cb);
        E = next;
    }

    EnergySeries out;
    out.order = order;
    for (int k = 0; k <= kmax; ++k) {
        auto it = E.c.find(k - 1);
        if (it != E.c.end()) out.coeff[k] = it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Direct numeric evaluation of the exponent integral along an explicit path
// through the barrier region: straight segments on the imaginary axis with a
// semicircular bend of radius r around phi = 0. The default bend keeps the
// branch cut of the infinite-B antiderivatives on the left; bending left
// instead lands on the companion sheet and returns -mu.
// ---------------------------------------------------------------------------

struct PathSpec {
    double Y = 30.0;  // endpoints at phi = -iY and +iY
    double r = 1.0;   // bend radius; keep order one, tiny radii lose all
                      // precision against the 1/sin^k growth of high orders
    bool bend_left = false;
};

struct ContourIntegralResult {
    std::complex<double> mu{};
    double quadrature_error = 0.0;
    bool converged = false;
};

namespace detail {

inline void check_path(const PathSpec& path) {
    constexpr double r_min = 1e-3;
    if (path.r < r_min)
        throw PathSingularity("contour path: bend radius below 1e-3");
    if (!(path.r < path.Y))
        throw PathSingularity("contour path: bend radius exceeds path height");
}

template <typename F>
std::pair<std::complex<double>, QuadResult<std::complex<double>>> path_integral(
    F&& integrand, const PathSpec& path, double tol) {
    using C = std::complex<double>;
    const C i_unit(0.0, 1.0);
    auto lower = integrate_adaptive<C>(
        [&](double t) { return integrand(C(0.0, t)) * i_unit; }, -path.Y,
        -path.r, tol);
    auto upper = integrate_adaptive<C>(
        [&](double t) { return integrand(C(0.0, t)) * i_unit; }, path.r,
        path.Y, tol);
    const double th0 = -0.5 * std::numbers::pi;
    const double th1 = path.bend_left ? -1.5 * std::numbers::pi
                                      : 0.5 * std::numbers::pi;
    auto bend = integrate_adaptive<C>(
        [&](double th) {
            const C phi = path.r * std::exp(C(0.0, th));
            return integrand(phi) * i_unit * phi;
        },
        th0, th1, tol);
    QuadResult<C> agg;
    agg.error = lower.error + bend.error + upper.error;
    agg.converged = lower.converged && bend.converged && upper.converged;
    return {lower.value + bend.value + upper.value, agg};
}

} // namespace detail

inline ContourIntegralResult numeric_contour_integral(const PendulumParams& p,
                                                      double E, int order,
                                                      const PathSpec& path = {}) {
    detail::check_path(path);

    const auto orders = riccati_orders(order);
    std::vector<CompiledTrig> compiled;
    std::vector<double> scale;
    for (int l = 0; l <= order; ++l) {
        compiled.push_back(
            compile_trig(orders[static_cast<std::size_t>(l) + 1], E, p.A));
        scale.push_back(std::pow(p.B, -0.5 * l));
    }
    // v_{-1} integrates to B^{1/2} (cos(iY) - cos(-iY)) = 0 along any path
    // with these endpoints, so only l >= 0 need quadrature.

    auto integrand = [&](std::complex<double> phi) {
        std::complex<double> acc = 0.0;
        for (std::size_t l = 0; l < compiled.size(); ++l)
            acc += scale[l] * compiled[l].eval(phi);
        return acc;
    };

    constexpr double tol = 1e-13;
    auto [total, agg] = detail::path_integral(integrand, path, tol);

    ContourIntegralResult out;
    out.mu = total / (std::complex<double>(0.0, 1.0) * std::numbers::pi);
    out.quadrature_error = agg.error / std::numbers::pi;
    out.converged = agg.converged;
    return out;
}

// Path integral of a single order, (1/(i pi)) times the integral of
// v_l(phi) with no B weighting; this is what the residue table predicts
// term by term. Orders l >= 0 only: v_{-1} is handled analytically in the
// full integral because its endpoint growth defeats quadrature.
inline ContourIntegralResult numeric_contour_order(const PendulumParams& p,
                                                   double E, int l,
                                                   const PathSpec& path = {}) {
    detail::check_path(path);
    if (l < 0)
        throw std::invalid_argument("numeric_contour_order: l must be >= 0");
    const auto orders = riccati_orders(l);
    const CompiledTrig one =
        compile_trig(orders[static_cast<std::size_t>(l) + 1], E, p.A);

    constexpr double tol = 1e-12;
    auto [total, agg] = detail::path_integral(
        [&](std::complex<double> phi) { return one.eval(phi); }, path, tol);

    ContourIntegralResult out;
    out.mu = total / (std::complex<double>(0.0, 1.0) * std::numbers::pi);
    out.quadrature_error = agg.error / std::numbers::pi;
    out.converged = agg.converged;
    return out;
}

} // namespace kapitza
