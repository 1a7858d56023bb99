#include <doctest.h>

#include <array>
#include <random>

#include <Eigen/Dense>

#include "uplink/rates.hpp"

#include "support/lp_solver.hpp"

using namespace uplink;

namespace {

// Variable order: R11 R21 R12 R22 R13 R23 R14 R24 R15 R25.
Eigen::MatrixXd region_matrix() {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(9, 10);
    A(0, 0) = A(0, 1) = 1.0;  // layer-1 sum
    A(1, 2) = A(1, 3) = 1.0;  // layer-2 sum
    A(2, 4) = 1.0;            // R13
    A(3, 5) = 1.0;            // R23
    A(4, 6) = 1.0;            // R14
    A(5, 7) = 1.0;            // R24
    A(6, 4) = A(6, 7) = 1.0;  // R13 + R24
    A(7, 5) = A(7, 6) = 1.0;  // R23 + R14
    A(8, 8) = A(8, 9) = 1.0;  // layer-5 sum
    return A;
}

Eigen::VectorXd region_rhs(const std::array<double, 6>& b) {
    Eigen::VectorXd rhs(9);
    rhs << b[0], b[1], b[2], b[3], b[4], b[4], b[2], b[3], b[5];
    // Rows 2..5 bound the individual third/fourth-layer rates (c twice, d
    // twice); rows 6..7 bound the cross pairs by e.
    rhs[2] = b[2];
    rhs[3] = b[2];
    rhs[4] = b[3];
    rhs[5] = b[3];
    rhs[6] = b[4];
    rhs[7] = b[4];
    rhs[8] = b[5];
    return rhs;
}

Eigen::VectorXd objective_vector(const RateWeights& w) {
    Eigen::VectorXd c(10);
    c << w.layer1, w.layer1, w.layer2, w.layer2, w.layer34, w.layer34,
        w.layer34, w.layer34, w.layer5, w.layer5;
    return c;
}

Eigen::VectorXd flatten(const RateAssignment& r) {
    Eigen::VectorXd x(10);
    x << r.rate(1, 1), r.rate(2, 1), r.rate(1, 2), r.rate(2, 2), r.rate(1, 3),
        r.rate(2, 3), r.rate(1, 4), r.rate(2, 4), r.rate(1, 5), r.rate(2, 5);
    return x;
}

}  // namespace

TEST_CASE("rate assignment accessors") {
    RateAssignment r;
    CHECK(r.total() == 0.0);
    r.set_rate(1, 3, 0.25);
    r.set_rate(2, 3, 0.5);
    r.set_rate(2, 5, 1.0);
    CHECK(r.rate(1, 3) == 0.25);
    CHECK(r.layer_sum(3) == 0.75);
    CHECK(r.layer_sum(4) == 0.0);
    CHECK(r.total() == 1.75);
}

TEST_CASE("state-probability weights") {
    const RateWeights w = RateWeights::from_low_state_probability(0.3);
    CHECK(w.layer1 == 1.0);
    CHECK(w.layer2 == doctest::Approx(0.91).epsilon(1e-15));
    CHECK(w.layer34 == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(w.layer5 == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("weighted sum of a hand-built assignment") {
    RateAssignment r;
    r.set_rate(1, 1, 1.0);
    r.set_rate(2, 2, 0.5);
    r.set_rate(1, 4, 0.25);
    r.set_rate(2, 5, 2.0);
    const RateWeights w{1.0, 0.8, 0.6, 0.4};
    CHECK(weighted_sum(r, w) ==
          doctest::Approx(1.0 + 0.8 * 0.5 + 0.6 * 0.25 + 0.4 * 2.0).epsilon(1e-14));
}

TEST_CASE("allocator reproduces a hand-computed optimum") {
    const std::array<double, 6> bounds{2.0, 1.4, 0.6, 0.5, 0.9, 0.8};
    const RateWeights w = RateWeights::from_low_state_probability(0.3);
    const RateAssignment r = max_weight_rates(bounds, w);
    // Cross-pair bound e = 0.9 binds before c + d = 1.1, so the middle block
    // contributes 2 * 0.9.
    CHECK(weighted_sum(r, w) ==
          doctest::Approx(2.0 + 0.91 * 1.4 + 0.7 * 1.8 + 0.49 * 0.8).epsilon(1e-12));
    CHECK(r.rate(1, 3) + r.rate(2, 4) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.rate(2, 3) + r.rate(1, 4) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("allocator matches exhaustive vertex enumeration") {
    const Eigen::MatrixXd A = region_matrix();
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> bound_draw(0.05, 4.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int trial = 0; trial < 8; ++trial) {
        std::array<double, 6> bounds{};
        for (double& b : bounds) b = bound_draw(rng);
        const RateWeights w =
            trial % 2 == 0
                ? RateWeights::from_low_state_probability(unit(rng))
                : RateWeights{unit(rng) + 0.5, unit(rng), unit(rng), unit(rng)};

        const double reference = testsupport::lp_max_by_vertex_enumeration(
            A, region_rhs(bounds), objective_vector(w));
        const RateAssignment r = max_weight_rates(bounds, w);
        const double got = weighted_sum(r, w);
        CHECK(got == doctest::Approx(reference).epsilon(1e-9));

        // The returned point must itself lie in the region.
        const Eigen::VectorXd x = flatten(r);
        CHECK(x.minCoeff() >= -1e-12);
        const Eigen::VectorXd slack = region_rhs(bounds) - A * x;
        CHECK(slack.minCoeff() >= -1e-9);
    }
}

TEST_CASE("allocator handles degenerate bounds and weights") {
    const RateWeights w = RateWeights::from_low_state_probability(0.5);

    // Zero bounds force zero rates in the affected layers.
    const RateAssignment r = max_weight_rates({0.0, 1.0, 0.0, 0.0, 1.0, 0.0}, w);
    CHECK(r.layer_sum(1) == 0.0);
    CHECK(r.layer_sum(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.layer_sum(3) + r.layer_sum(4) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.layer_sum(5) == 0.0);

    // Zero weight on a layer never produces a negative contribution.
    const RateWeights zero_tail{1.0, 0.0, 0.0, 0.0};
    const RateAssignment z = max_weight_rates({1.5, 2.0, 1.0, 1.0, 1.0, 1.0}, zero_tail);
    CHECK(weighted_sum(z, zero_tail) == doctest::Approx(1.5).epsilon(1e-12));
}
