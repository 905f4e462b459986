// Scan the barrier height at fixed tilt and print the lowest well levels
// from the deep-well series next to the matrix oracle.
//
//   ./example_spectrum [A] [levels]

#include "kapitza/oracle.hpp"
#include "kapitza/series.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    using namespace kapitza;
    const double A = argc > 1 ? std::atof(argv[1]) : 1.0;
    const int levels = argc > 2 ? std::atoi(argv[2]) : 4;

    std::printf("A,B,mu,series,first_omitted,oracle,abs_error\n");
    for (double B : {400.0, 900.0, 2500.0, 1.0e4, 4.0e4}) {
        const PendulumParams p{A, B};
        for (int mu = 0; mu < levels; ++mu) {
            const auto w = oscillatory_energy_0(p, mu, 5);
            const double oracle = nearest_level(p, mu, w.value);
            std::printf("%g,%g,%d,%.12f,%.3e,%.12f,%.3e\n", A, B, mu, w.value,
                        w.first_omitted, oracle,
                        std::abs(w.value - oracle));
        }
    }
    return 0;
}
