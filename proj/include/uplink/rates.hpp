#pragma once

#include <array>

#include <Eigen/Core>

namespace uplink {

/// Per-user, per-layer rates R_{j,k} in bits per channel use.
/// Users are 1-based (1, 2); layers are 1-based (1..5).
class RateAssignment {
  public:
    RateAssignment() { m_.setZero(); }

    double rate(int user, int layer) const { return m_(user - 1, layer - 1); }
    void set_rate(int user, int layer, double value) { m_(user - 1, layer - 1) = value; }

    double layer_sum(int layer) const { return m_.col(layer - 1).sum(); }
    double total() const { return m_.sum(); }

  private:
    Eigen::Matrix<double, 2, 5> m_;
};

/// Objective coefficients of the average-throughput linear program. Each
/// coefficient multiplies the indicated per-layer rate sum.
struct RateWeights {
    double layer1;   ///< delivered in every state
    double layer2;   ///< delivered when at least one link is high
    double layer34;  ///< each third/fourth-layer rate, delivered per high link
    double layer5;   ///< delivered only when both links are high

    static RateWeights from_low_state_probability(double p) {
        const double q = 1.0 - p;
        return {1.0, 1.0 - p * p, q, q * q};
    }
};

/// Maximizes the weighted rate sum over the six-constraint region
///   R_{1,1}+R_{2,1} <= a,   R_{1,2}+R_{2,2} <= b,
///   R_{j,3} <= c,           R_{j,4} <= d,
///   R_{1,3}+R_{2,4} <= e,   R_{2,3}+R_{1,4} <= e,
///   R_{1,5}+R_{2,5} <= f,   all rates >= 0.
/// With nonnegative weights the maximum binds the sum constraints, and the
/// third/fourth-layer block totals 2 * min(e, c + d); the split between the
/// users is symmetric. bounds = {a, b, c, d, e, f}.
RateAssignment max_weight_rates(const std::array<double, 6>& bounds,
                                const RateWeights& weights);

/// Weighted objective value of an assignment.
double weighted_sum(const RateAssignment& rates, const RateWeights& weights);

}  // namespace uplink
