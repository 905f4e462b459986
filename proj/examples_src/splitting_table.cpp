// Doublet structure of the lowest levels as the tilt grows: two-level
// parameters from the barrier coupling model at fixed barrier height.
//
//   ./example_splitting [B]

#include "kapitza/tunneling.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    using namespace kapitza;
    const double B = argc > 1 ? std::atof(argv[1]) : 100.0;

    std::printf("A,B,mu,E0,Epi,gamma,delta,theta,S_plus\n");
    for (double A : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        for (int mu = 0; mu < 3; ++mu) {
            const auto rep = splitting_report({A, B}, mu, CouplingOptions{});
            const auto& lv = rep.levels;
            std::printf("%g,%g,%d,%.10f,%.10f,%.6e,%.6e,%.6f,%.6f\n", A, B,
                        mu, lv.E0, lv.Epi, lv.gamma, lv.delta, lv.theta,
                        lv.S_plus);
        }
    }
    return 0;
}
