#include "mhdbl/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace mhdbl {

Shapes random_shapes(const GridPtr& grid, const ShapeSpec& spec) {
    if (spec.modes < 1) throw std::invalid_argument("random_shapes: need at least one mode");
    if (static_cast<std::size_t>(spec.modes) >= grid->nyquist()) {
        throw std::invalid_argument("random_shapes: modes must stay below the Nyquist bin");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> a, pa, c, pc;
    for (int k = 1; k <= spec.modes; ++k) {
        const double scale = std::ldexp(1.0, -k);
        a.push_back(scale * amp(rng));
        pa.push_back(phase(rng));
        c.push_back(scale * amp(rng));
        pc.push_back(phase(rng));
    }
    const double kappa = 2.0 * std::numbers::pi / grid->lx();
    auto xs = [&](const std::vector<double>& amps, const std::vector<double>& ph, double x) {
        double s = 0.0;
        for (std::size_t k = 0; k < amps.size(); ++k) s += amps[k] * std::cos(kappa * (k + 1.0) * x + ph[k]);
        return s;
    };
    Shapes out;
    out.u = Field::from_function(grid, [&](double x, double y) { return xs(a, pa, x) * y * std::exp(-0.5 * y * y); });
    out.b = Field::from_function(grid, [&](double x, double y) {
        return xs(c, pc, x) * (1.0 + spec.b_quad * y * y) * std::exp(-0.5 * y * y);
    });
    return out;
}

}  // namespace mhdbl
