#include "support.hpp"

#include <cmath>
#include <complex>

using namespace kapitza;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("well energy spot values") {
    CHECK(oscillatory_energy_0({0.0, 1.0e4}, 0).value ==
          Approx(99.7493702600170898).epsilon(1e-14));
    CHECK(oscillatory_energy_0({1.0, 2500.0}, 1).value ==
          Approx(147.753651176367187).epsilon(1e-14));
    CHECK(oscillatory_energy_0({5.0, 1.0e4}, 3).value ==
          Approx(688.780448167199707).epsilon(1e-14));
    CHECK(oscillatory_energy_0({0.0, 1.0e4}, 0).deep_well);
    CHECK_FALSE(oscillatory_energy_0({0.0, 25.0}, 3).deep_well);
    CHECK_THROWS_AS(oscillatory_energy_0({0.0, -1.0}, 0), NonPositiveInput);
    CHECK_THROWS_AS(oscillatory_energy_0({0.0, 1.0e4}, -1), NonPositiveInput);
}

TEST_CASE("pi well levels are the reflected zero well levels") {
    const PendulumParams p{3.0, 2500.0};
    for (int mu : {0, 1, 2, 3}) {
        const auto a = oscillatory_energy_pi(p, mu);
        const auto b = oscillatory_energy_0({-p.A, p.B}, mu);
        // bit identical, not merely close
        CHECK(a.value == b.value);
        CHECK(a.first_omitted == b.first_omitted);
    }
}

TEST_CASE("well series tracks the matrix oracle on the frozen doublets") {
    // periodic-sector fixtures hold doublets (well 0 lower, well pi upper
    // for A > 0); check levels 2 mu and 2 mu + 1 against the two wells.
    for (const auto& f : kapfix::kSpectra) {
        if (f.antiperiodic) continue;
        const PendulumParams p{f.A, f.B};
        if (!is_deep_well(p, 1)) continue; // shallow rows have no doublets
        for (int mu = 0; mu <= 1; ++mu) {
            const auto low = oscillatory_energy_0(p, mu);
            const auto high = oscillatory_energy_pi(p, mu);
            const double tol_low = std::max(20.0 * low.first_omitted, 1e-9);
            const double tol_high = std::max(20.0 * high.first_omitted, 1e-9);
            INFO("A=" << f.A << " B=" << f.B << " mu=" << mu);
            if (f.A > 0.0) {
                CHECK(low.value == Approx(f.ev[2 * mu]).margin(tol_low));
                CHECK(high.value == Approx(f.ev[2 * mu + 1]).margin(tol_high));
            } else {
                // degenerate wells: both members of the doublet collapse
                CHECK(low.value == Approx(f.ev[2 * mu]).margin(tol_low));
                CHECK(low.value == Approx(f.ev[2 * mu + 1]).margin(tol_low));
            }
        }
    }
}

TEST_CASE("rotating energy matches the closed form term by term") {
    const auto r = rotating_energy({0.0, 1.0}, 10.0);
    CHECK(r.value ==
          Approx(100.0 + 0.5 + 1.0 / 3200.0 + 2.0 / 640000.0).margin(1e-12));
    CHECK(r.fast_rotor);
    CHECK_FALSE(rotating_energy({0.0, 9.0}, 2.0).fast_rotor);
    CHECK_THROWS_AS(rotating_energy({0.0, 1.0}, 0.0), NonPositiveInput);
    CHECK_THROWS_AS(rotating_energy({0.0, 1.0}, 10.0, 3), NonPositiveInput);
    // truncation order strictly improves the defect against the full form
    const double full = rotating_energy({1.0, 2.0}, 10.0, 2).value;
    const double e0 = std::abs(rotating_energy({1.0, 2.0}, 10.0, 0).value - full);
    const double e1 = std::abs(rotating_energy({1.0, 2.0}, 10.0, 1).value - full);
    CHECK(e1 < e0);
}

TEST_CASE("rotating energy agrees with the frozen oracle values") {
    double worst10 = 0.0, worst15 = 0.0;
    for (const auto& f : kapfix::kRotatingOracle) {
        const auto r = rotating_energy({f.A, f.B}, f.nu);
        const double rel = std::abs(r.value - f.energy) / std::abs(f.energy);
        INFO("nu=" << f.nu << " A=" << f.A << " B=" << f.B);
        CHECK(rel < 1e-4);
        if (f.nu < 12.0)
            worst10 = std::max(worst10, rel);
        else
            worst15 = std::max(worst15, rel);
    }
    CHECK(worst15 < worst10); // faster rotation, better series
}

TEST_CASE("rotating wavefunction basics") {
    const PendulumParams p{0.5, 1.5};
    const double nu = 15.0;

    RotatingOptions quad;
    quad.normalization = Normalization::quadrature;
    auto density = [&](double x) {
        return std::norm(rotating_wavefunction(p, nu, x, quad));
    };
    const auto q = integrate_adaptive<double>(density, 0.0, 2.0 * kPi, 1e-11);
    CHECK(q.value == Approx(1.0).margin(1e-8));

    // the standing combinations are the sum and difference of the senses
    RotatingOptions plus, minus, cosine;
    plus.branch = RotatingBranch::plus;
    minus.branch = RotatingBranch::minus;
    cosine.branch = RotatingBranch::cosine;
    const double phi = 0.9;
    const auto sum = rotating_wavefunction(p, nu, phi, plus) +
                     rotating_wavefunction(p, nu, phi, minus);
    const auto cs = rotating_wavefunction(p, nu, phi, cosine);
    CHECK(std::abs(sum - cs) < 1e-12);

    // residual of the stationary equation, via central differences
    const double E = rotating_energy(p, nu).value;
    const double h = 1e-4;
    auto psi = [&](double x) { return rotating_wavefunction(p, nu, x, plus); };
    const auto lap = (psi(phi + h) - 2.0 * psi(phi) + psi(phi - h)) / (h * h);
    const auto resid = -lap + eval_potential(p, phi) * psi(phi) - E * psi(phi);
    CHECK(std::abs(resid) / std::abs(E * psi(phi)) < 1e-3);
}

TEST_CASE("reference chart values in the weak coupling regime") {
    // n = 3, h = 1: continuation formula against the mean of the frozen
    // band edge pair
    const auto r = mathieu_reference(3, 1.0, MathieuRegime::weak);
    // fixture b[] starts at b_1, so b_3 sits in slot 2
    const double mean = 0.5 * (kapfix::kMathieuAB[0].a[3] + kapfix::kMathieuAB[0].b[2]);
    CHECK(r.value == Approx(mean).margin(2e-4));
    CHECK_THROWS_AS(mathieu_reference(1, 1.0, MathieuRegime::weak),
                    WeakSeriesSingular);
    CHECK_THROWS_AS(mathieu_reference(0, 1.0, MathieuRegime::weak),
                    WeakSeriesSingular);
    const auto r2 = mathieu_reference(2, 0.5, MathieuRegime::weak);
    CHECK(r2.first_omitted == Approx(std::pow(0.5, 4)).margin(1e-15));
}

TEST_CASE("reference chart values in the strong coupling regime") {
    const double q = 25.0;
    const auto& f = kapfix::kMathieuAB[2];
    for (int n = 0; n <= 2; ++n) {
        const auto r = mathieu_reference(n, q, MathieuRegime::strong);
        INFO("n=" << n << " value=" << r.value << " edge=" << f.a[n]);
        CHECK(std::abs(r.value - f.a[n]) < 2.0 * r.first_omitted);
    }
    // deep pairing: a_n and b_{n+1} agree far beyond the series accuracy
    CHECK(std::abs(f.a[0] - f.b[0]) < 1e-5);
    CHECK(std::abs(f.a[1] - f.b[1]) < 1e-3);
}
