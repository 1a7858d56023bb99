#include "uplink/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uplink {

RateAssignment max_weight_rates(const std::array<double, 6>& bounds,
                                const RateWeights& weights) {
    for (double b : bounds)
        if (!(b >= 0.0) || !std::isfinite(b))
            throw std::invalid_argument("rate bounds must be finite and >= 0");
    if (!(weights.layer1 >= 0.0) || !(weights.layer2 >= 0.0) ||
        !(weights.layer34 >= 0.0) || !(weights.layer5 >= 0.0))
        throw std::invalid_argument("weights must be >= 0");

    const double a = bounds[0], b = bounds[1], c = bounds[2];
    const double d = bounds[3], e = bounds[4], f = bounds[5];

    // Pair total per high link; x3 <= c and x4 = t - x3 <= d by construction.
    const double t = std::min(e, c + d);
    const double x3 = std::min(c, t);
    const double x4 = t - x3;

    RateAssignment r;
    r.set_rate(1, 1, 0.5 * a);
    r.set_rate(2, 1, 0.5 * a);
    r.set_rate(1, 2, 0.5 * b);
    r.set_rate(2, 2, 0.5 * b);
    r.set_rate(1, 3, x3);
    r.set_rate(2, 3, x3);
    r.set_rate(1, 4, x4);
    r.set_rate(2, 4, x4);
    r.set_rate(1, 5, 0.5 * f);
    r.set_rate(2, 5, 0.5 * f);
    return r;
}

double weighted_sum(const RateAssignment& r, const RateWeights& w) {
    return w.layer1 * r.layer_sum(1) + w.layer2 * r.layer_sum(2) +
           w.layer34 * (r.layer_sum(3) + r.layer_sum(4)) + w.layer5 * r.layer_sum(5);
}

}  // namespace uplink
