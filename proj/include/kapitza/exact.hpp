#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace kapitza {

// Exact rational scalar used by every symbolic table in the library.
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Parse "p/q" or "p". Exact, no floating point involved.
inline Rat rat_from_string(const std::string& s) {
    return Rat(s);
}

inline std::string rat_to_string(const Rat& r) {
    return r.str();
}

// Sparse bivariate polynomial with rational coefficients. The two slots are
// abstract; callers document their meaning per table (energy and tilt for
// the exponent series, index and tilt for the well tables).
class BiPoly {
public:
    using Key = std::pair<int, int>; // (power of x, power of y)
    using Map = std::map<Key, Rat>;

    BiPoly() = default;

    static BiPoly constant(const Rat& c) {
        BiPoly p;
        if (c != 0) p.terms_[{0, 0}] = c;
        return p;
    }

    static BiPoly monomial(int i, int j, const Rat& c) {
        BiPoly p;
        if (c != 0) p.terms_[{i, j}] = c;
        return p;
    }

    static BiPoly var_x() { return monomial(1, 0, 1); }
    static BiPoly var_y() { return monomial(0, 1, 1); }

    bool is_zero() const { return terms_.empty(); }

    const Map& terms() const { return terms_; }

    void add_term(int i, int j, const Rat& c) {
        if (c == 0) return;
        auto it = terms_.find({i, j});
        if (it == terms_.end()) {
            terms_[{i, j}] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    BiPoly& operator+=(const BiPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
        return *this;
    }

    BiPoly& operator-=(const BiPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
        return *this;
    }

    friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
    friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }

    friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
        BiPoly r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
        return r;
    }

    friend BiPoly operator*(const Rat& s, const BiPoly& p) {
        BiPoly r;
        if (s == 0) return r;
        for (const auto& [k, c] : p.terms_) r.terms_[k] = s * c;
        return r;
    }

    BiPoly operator-() const { return Rat(-1) * (*this); }

    bool operator==(const BiPoly& o) const { return terms_ == o.terms_; }

    // Evaluate over any commutative ring T constructible from Rat.
    template <typename T>
    T eval(const T& x, const T& y) const {
        T acc(Rat(0));
        for (const auto& [k, c] : terms_) {
            T t(c);
            for (int i = 0; i < k.first; ++i) t = t * x;
            for (int j = 0; j < k.second; ++j) t = t * y;
            acc = acc + t;
        }
        return acc;
    }

    Rat eval_rat(const Rat& x, const Rat& y) const {
        Rat acc = 0;
        for (const auto& [k, c] : terms_) {
            Rat t = c;
            for (int i = 0; i < k.first; ++i) t *= x;
            for (int j = 0; j < k.second; ++j) t *= y;
            acc += t;
        }
        return acc;
    }

    double eval_double(double x, double y) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_) {
            double t = to_double(c);
            for (int i = 0; i < k.first; ++i) t *= x;
            for (int j = 0; j < k.second; ++j) t *= y;
            acc += t;
        }
        return acc;
    }

    // Substitute x -> v, keep y. Result is a polynomial in y alone when the
    // caller passes a scalar.
    BiPoly subst_x(const BiPoly& v) const {
        BiPoly r;
        for (const auto& [k, c] : terms_) {
            BiPoly t = BiPoly::constant(c);
            for (int i = 0; i < k.first; ++i) t = t * v;
            t = t * BiPoly::monomial(0, k.second, 1);
            r += t;
        }
        return r;
    }

    int degree_x() const {
        int d = 0;
        for (const auto& [k, c] : terms_) {
            (void)c;
            if (k.first > d) d = k.first;
        }
        return d;
    }

    // Coefficient of x^i as a polynomial in y.
    BiPoly coeff_x(int i) const {
        BiPoly r;
        for (const auto& [k, c] : terms_)
            if (k.first == i) r.add_term(0, k.second, c);
        return r;
    }

private:
    Map terms_;
};

// Exact double-factorial ratio (2n-1)!!/(2n)!! used by the residue rules.
inline Rat semifactorial_ratio(int n) {
    if (n < 0) throw std::invalid_argument("semifactorial_ratio: n < 0");
    Rat r = 1;
    for (int i = 1; i <= n; ++i) r *= Rat(2 * i - 1) / Rat(2 * i);
    return r;
}

} // namespace kapitza
