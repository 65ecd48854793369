// Samples the traces of a few chordal SLE4 curves on the cylinder with
// Dirichlet-Neumann conditions and prints (path, t, Re, Im) rows.

#include <cstdio>

#include "sle4/sle4.hpp"

int main() {
    using namespace sle4;
    LoewnerConfig cfg;
    cfg.sim.x0 = special::pi;
    cfg.sim.p = 1.0;
    cfg.sim.seed = 2026;
    std::printf("path t re im outcome\n");
    for (std::uint64_t path = 0; path < 5; ++path) {
        const LoewnerPath lp = evolve(DirichletNeumann{}, cfg, path);
        const DriverPath driver = DriverPath::from(lp);
        std::vector<double> times;
        for (int i = 1; i <= 40; ++i) times.push_back(driver.end_time() * i / 41.0);
        for (const auto& pt : trace(driver, cfg.sim.p, cfg.sim.dt0, times)) {
            if (pt.ok) std::printf("%llu %.5f %.6f %.6f %s\n", static_cast<unsigned long long>(path), pt.t, pt.re, pt.im,
                                   to_string(lp.outcome.kind));
        }
    }
}
