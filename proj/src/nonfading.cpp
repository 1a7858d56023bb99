#include "uplink/nonfading.hpp"

#include <cmath>
#include <stdexcept>

#include "uplink/errors.hpp"

namespace uplink {

namespace {

double pow2(double x) { return std::exp2(x); }

void require_capacity(const SystemParams& p) {
    if (!(p.cap_low > 0.0))
        throw DegenerateCapacityError(
            "cap_low must be positive: a zero-capacity coarse description has "
            "infinite quantization noise");
}

}  // namespace

CompressionNoises sigma_separate(const SystemParams& p) {
    require_capacity(p);
    const double k = p.power * (1.0 + p.alpha * p.alpha) + 1.0;
    const double sigma2 = k / (pow2(2.0 * (p.cap_low + p.cap_delta)) - 1.0);
    if (p.cap_delta == 0.0) return {0.0, sigma2};
    const double sigma1 = pow2(2.0 * p.cap_low) * (pow2(2.0 * p.cap_delta) - 1.0) * k /
                          ((pow2(2.0 * p.cap_low) - 1.0) *
                           (pow2(2.0 * (p.cap_low + p.cap_delta)) - 1.0));
    return {sigma1, sigma2};
}

CompressionNoises sigma_joint(const SystemParams& p) {
    require_capacity(p);
    const double k = p.power * (1.0 + p.alpha * p.alpha) + 1.0;
    const double b1 = p.power * (1.0 - p.alpha) * (1.0 - p.alpha) + 1.0;
    const double b2 = p.power * (1.0 + p.alpha) * (1.0 + p.alpha) + 1.0;

    // The joint-recovery sum-rate equality pins only s = sigma1^2 + sigma2^2:
    //   (2^{4C} - 1) s^2 - (b1 + b2) s - b1 b2 = 0.
    const double s =
        positive_quadratic_root(pow2(4.0 * p.cap_low) - 1.0, -(b1 + b2), -b1 * b2);
    const double residual =
        (pow2(4.0 * p.cap_low) - 1.0) * s * s - (b1 + b2) * s - b1 * b2;
    if (std::abs(residual) > 1e-10 * std::max(b1 * b2, s * s))
        throw std::runtime_error("joint-noise quadratic residual too large");

    // The refinement-rate equality then fixes the split of s.
    const double sigma2 = s * k / (pow2(2.0 * p.cap_delta) * (k + s) - s);
    const double sigma1 = s - sigma2;
    const double split_residual =
        p.cap_delta - (0.5 * std::log2(1.0 + sigma1 / sigma2) +
                       0.5 * std::log2(1.0 - sigma1 / (k + s)));
    if (std::abs(split_residual) > 1e-10)
        throw std::runtime_error("joint-noise split residual too large");
    return {sigma1, sigma2};
}

namespace {

// Interference seen by a decoder: undecoded layer sets per user, scaled by
// the transmit power.
HermitianM2 interference(double power, double sum1, double sum2,
                         const HermitianM2& a1, const HermitianM2& a2) {
    return power * sum1 * a1 + power * sum2 * a2;
}

}  // namespace

LayerBounds layer_bounds(const SystemParams& p, const SimplexPoint& lambda,
                         const CompressionNoises& noises) {
    if (lambda.size() != 5) throw std::invalid_argument("lambda must have 5 layers");
    const auto [a1, a2] = gain_matrices_nf(p.alpha);
    const HermitianM2 s = a1 + a2;
    const double P = p.power;
    const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2], l4 = lambda[3],
                 l5 = lambda[4];
    const double coarse = 1.0 + noises.sum();    // link still on the coarse stage
    const double refined = 1.0 + noises.sigma2_sq;

    // Noise diag(refined, coarse) is the mixed state with link 1 refined; the
    // mirrored state gives identical values because swapping the users swaps
    // a1 and a2 and reverses the diagonal simultaneously.
    const HermitianM2 mixed = HermitianM2::diagonal(refined, coarse);

    LayerBounds out{};
    out.a = logdet_form(l1 * P * s,
                        interference(P, l2 + l3 + l4 + l5, l2 + l3 + l4 + l5, a1, a2) +
                            HermitianM2::identity(coarse),
                        0.5);
    out.b = logdet_form(l2 * P * s,
                        interference(P, l3 + l4 + l5, l3 + l4 + l5, a1, a2) + mixed,
                        0.5);
    const HermitianM2 den34 = interference(P, l4 + l5, l3 + l5, a1, a2) + mixed;
    out.c = logdet_form(l3 * P * a1, den34, 0.5);
    out.d = logdet_form(l4 * P * a2, den34, 0.5);
    out.e = logdet_form(P * (l3 * a1) + P * (l4 * a2), den34, 0.5);
    out.f = logdet_form(l5 * P * s, HermitianM2::identity(refined), 0.5);
    return out;
}

StateThroughputs state_throughputs(const RateAssignment& r) {
    const double t1 = r.layer_sum(1);
    const double base2 = t1 + r.layer_sum(2);
    return {
        t1,
        base2 + r.rate(1, 3) + r.rate(2, 4),
        base2 + r.rate(1, 4) + r.rate(2, 3),
        base2 + r.layer_sum(3) + r.layer_sum(4) + r.layer_sum(5),
    };
}

namespace {

double average_over_states(const StateThroughputs& t, double p) {
    const double q = 1.0 - p;
    return p * p * t.t1 + p * q * (t.t2 + t.t3) + q * q * t.t4;
}

}  // namespace

ThroughputReport achievable_throughput(const SystemParams& p,
                                       const SimplexPoint& lambda,
                                       DecompressionMode mode) {
    const CompressionNoises noises =
        mode == DecompressionMode::separate ? sigma_separate(p) : sigma_joint(p);
    const LayerBounds bounds = layer_bounds(p, lambda, noises);
    const RateWeights weights = RateWeights::from_low_state_probability(p.p_low);
    const RateAssignment rates = max_weight_rates(bounds.as_array(), weights);
    const StateThroughputs t = state_throughputs(rates);
    return {t.t1, t.t2, t.t3, t.t4, average_over_states(t, p.p_low),
            lambda, rates, mode};
}

ThroughputReport optimize_scheme(const SystemParams& p, DecompressionMode mode,
                                 const SchemeMask& mask, long budget) {
    const SimplexOptimum opt = maximize_on_simplex(
        [&](const SimplexPoint& lambda) {
            return achievable_throughput(p, lambda, mode).average;
        },
        mask, budget);
    return achievable_throughput(p, opt.point, mode);
}

UpperBoundReport upper_bound_report(const SystemParams& p) {
    require_capacity(p);
    const auto [a1, a2] = gain_matrices_nf(p.alpha);
    const HermitianM2 s = a1 + a2;
    const double P = p.power;
    const double k = P * (1.0 + p.alpha * p.alpha) + 1.0;
    const double b1 = P * (1.0 - p.alpha) * (1.0 - p.alpha) + 1.0;
    const double b2 = P * (1.0 + p.alpha) * (1.0 + p.alpha) + 1.0;

    auto description_noise = [&](double total_bits) {
        return positive_quadratic_root(pow2(4.0 * total_bits) - 1.0, -(b1 + b2),
                                       -b1 * b2);
    };
    const double sigma1 = description_noise(p.cap_low);
    const double sigma4 = description_noise(p.cap_low + p.cap_delta);

    const double t1 = logdet_form(P * s, HermitianM2::identity(1.0 + sigma1), 0.5);
    const double t3 = logdet_form(P * s, HermitianM2::identity(1.0 + sigma4), 0.5);

    // Mixed state: one refined and one coarse description. The genie picks
    // the per-link noises subject to three minimum-description-rate
    // constraints; large noises are always feasible.
    const double four_asq_psq = 4.0 * p.alpha * p.alpha * P * P;
    auto feasible = [&](const Eigen::VectorXd& x) {
        const double g = (k + x[0]) * (k + x[1]) - four_asq_psq;
        const bool c1 = 0.5 * std::log2(g / ((k + x[1]) * x[0])) <=
                        p.cap_low + p.cap_delta;
        const bool c2 = 0.5 * std::log2(g / ((k + x[0]) * x[1])) <= p.cap_low;
        const bool c3 = 0.5 * std::log2(g / (x[0] * x[1])) <=
                        2.0 * p.cap_low + p.cap_delta;
        return c1 && c2 && c3;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        return logdet_form(P * s, HermitianM2::diagonal(1.0 + x[0], 1.0 + x[1]), 0.5);
    };

    Eigen::VectorXd lower(2), upper(2);
    lower << 1e-6, 1e-6;
    upper << 1e6, 1e6;
    if (!feasible(upper))
        throw std::logic_error("upper corner of the noise box must be feasible");
    const BoxOptimum mixed = maximize_on_box(objective, lower, upper, feasible, 20000);

    // The symmetric low-state pair always satisfies the mixed-state
    // constraints; at cap_delta = 0 it is the entire feasible optimum and
    // sits on a boundary the search grid cannot reach exactly.
    double t2 = mixed.value;
    Eigen::VectorXd mixed_point = mixed.point;
    Eigen::VectorXd symmetric(2);
    symmetric << sigma1, sigma1;
    if (objective(symmetric) > t2) {
        t2 = objective(symmetric);
        mixed_point = symmetric;
    }

    const double q = 1.0 - p.p_low;
    return {p.p_low * p.p_low * t1 + 2.0 * p.p_low * q * t2 + q * q * t3,
            t1,
            t2,
            t3,
            sigma1,
            sigma4,
            mixed_point[0],
            mixed_point[1]};
}

double upper_bound(const SystemParams& p) { return upper_bound_report(p).average; }

}  // namespace uplink
