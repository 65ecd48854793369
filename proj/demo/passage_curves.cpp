// Prints passage and hitting probabilities across the interval for the three
// boundary families at a few moduli, as whitespace-separated columns.

#include <cstdio>

#include "sle4/sle4.hpp"

int main() {
    using namespace sle4;
    const std::pair<const char*, BoundaryCondition> families[] = {
        {"dd(mu=0)", DirichletUncompactified{0.0}},
        {"dn", DirichletNeumann{}},
        {"su2(a=0.6i)", SU2::from_a({0.0, 0.6})},
    };
    for (const auto& [name, bc] : families) {
        for (double p : {0.5, 1.0, special::pi}) {
            std::printf("# %s p=%.4f\n# x alpha beta gamma\n", name, p);
            for (const auto& pt : probability_curve(bc, p, uniform_grid(15))) {
                std::printf("%.4f %.6f %.6f %.6f\n", pt.x, pt.probs.alpha, pt.probs.beta, pt.probs.gamma);
            }
            std::printf("\n");
        }
    }
}
