#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "uplink/errors.hpp"
#include "uplink/numerics.hpp"

using namespace uplink;

TEST_CASE("log-det form matches a direct dense evaluation") {
    // Diagonal case with a known value: 0.5 * log2 det(I + diag(3, 0)) = 1.
    CHECK(logdet_form(HermitianM2::diagonal(3.0, 0.0), HermitianM2::identity(), 0.5) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const HermitianM2 num{2.0, 1.5, {0.75, 0.5}};
    const HermitianM2 den{1.2, 0.9, {0.1, -0.2}};
    const Eigen::Matrix2cd n = num.matrix();
    const Eigen::Matrix2cd d = den.matrix();
    const double direct =
        std::log2(((d + n).determinant() / d.determinant()).real());
    CHECK(logdet_form(num, den, 1.0) == doctest::Approx(direct).epsilon(1e-13));
    CHECK(logdet_form(num, den, 0.5) == doctest::Approx(0.5 * direct).epsilon(1e-13));

    // Zero numerator carries zero information.
    CHECK(logdet_form(HermitianM2::zero(), den, 0.5) == 0.0);

    CHECK_THROWS_AS(logdet_form(num, HermitianM2::zero(), 0.5),
                    SingularDenominatorError);
    CHECK_THROWS_AS(logdet_form(HermitianM2::diagonal(1.0, -1.0),
                                HermitianM2::identity(), 0.5),
                    std::invalid_argument);
}

TEST_CASE("positive quadratic root") {
    CHECK(positive_quadratic_root(63.0, -23.8, -105.61) ==
          doctest::Approx(1.4973338509315746).epsilon(1e-14));

    // The returned value satisfies the equation and is the positive root.
    const double a = 2.5, b = 7.0, c = -3.25;
    const double r = positive_quadratic_root(a, b, c);
    CHECK(r > 0.0);
    CHECK(a * r * r + b * r + c == doctest::Approx(0.0).epsilon(1e-12));

    // Cancellation-prone coefficients still give a clean root.
    const double big = positive_quadratic_root(1.0, 1e8, -1.0);
    CHECK(big * (big + 1e8) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(positive_quadratic_root(-1.0, 1.0, -1.0), NoPositiveRootError);
    CHECK_THROWS_AS(positive_quadratic_root(1.0, 1.0, 1.0), NoPositiveRootError);
}

TEST_CASE("simplex points validate their weights") {
    Eigen::VectorXd w(3);
    w << 0.2, 0.3, 0.5;
    const SimplexPoint pt(w);
    CHECK(pt.size() == 3);
    CHECK(pt[1] == 0.3);

    const SimplexPoint single = SimplexPoint::single(5, 2);
    CHECK(single[2] == 1.0);
    CHECK(single[0] == 0.0);

    Eigen::VectorXd bad(2);
    bad << 0.5, 0.6;
    CHECK_THROWS_AS((SimplexPoint(bad)), std::invalid_argument);
    bad << -0.1, 1.1;
    CHECK_THROWS_AS((SimplexPoint(bad)), std::invalid_argument);
    CHECK_THROWS_AS((SimplexPoint(Eigen::VectorXd())), std::invalid_argument);
}

TEST_CASE("scheme masks parse and print layer subsets") {
    const SchemeMask m = SchemeMask::parse("1+2+5");
    CHECK(m.contains(1));
    CHECK(m.contains(2));
    CHECK(!m.contains(3));
    CHECK(m.contains(5));
    CHECK(m.count() == 3);
    CHECK(m.layers() == std::vector<int>{1, 2, 5});
    CHECK(m.label() == "1+2+5");

    // Round trip through parse/label, unordered input included.
    CHECK(SchemeMask::parse("5+1+2").label() == "1+2+5");
    CHECK(SchemeMask::of({1}).label() == "1");
    CHECK(SchemeMask::of({1, 2, 3, 4, 5}).count() == 5);

    // The always-delivered layer is mandatory.
    CHECK_THROWS_AS(SchemeMask::parse("2+5"), std::invalid_argument);
    CHECK_THROWS_AS(SchemeMask::of({2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(SchemeMask::parse("1+6"), std::invalid_argument);
    CHECK_THROWS_AS(SchemeMask::parse("0+1"), std::invalid_argument);
    CHECK_THROWS_AS(SchemeMask::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(SchemeMask::parse("abc"), std::invalid_argument);

    // Separators are lenient; layer digits are not.
    CHECK(SchemeMask::parse("1 + 2").label() == "1+2");
}

TEST_CASE("simplex maximization finds a smooth interior optimum") {
    // max w0*w1 on the 2-simplex restricted to layers {1, 2}: 0.25 at (.5, .5).
    const auto objective = [](const SimplexPoint& p) { return p[0] * p[1]; };
    const SimplexOptimum opt =
        maximize_on_simplex(objective, SchemeMask::of({1, 2}), 100000);
    CHECK(opt.value == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(opt.point[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(opt.point.size() == 5);
    CHECK(opt.point[2] == 0.0);
    CHECK(opt.point[3] == 0.0);
    CHECK(opt.point[4] == 0.0);

    // Masked-out layers never receive mass even when they would help.
    const auto favors_last = [](const SimplexPoint& p) { return p[4]; };
    const SimplexOptimum none =
        maximize_on_simplex(favors_last, SchemeMask::of({1, 2}), 100000);
    CHECK(none.value == 0.0);

    // A single-layer mask has exactly one feasible point.
    const SimplexOptimum fixed =
        maximize_on_simplex(favors_last, SchemeMask::of({1}), 100000);
    CHECK(fixed.point[0] == 1.0);
}

TEST_CASE("simplex maximization is deterministic and budget-capped") {
    const auto objective = [](const SimplexPoint& p) {
        return p[0] * p[1] + 0.5 * p[1] * p[4];
    };
    const SchemeMask mask = SchemeMask::of({1, 2, 5});
    const SimplexOptimum a = maximize_on_simplex(objective, mask, 100000);
    const SimplexOptimum b = maximize_on_simplex(objective, mask, 100000);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
    CHECK((a.point.weights() - b.point.weights()).norm() == 0.0);

    const SimplexOptimum capped = maximize_on_simplex(objective, mask, 50);
    CHECK(capped.evaluations <= 50);
    CHECK(capped.value <= a.value);
}

TEST_CASE("box maximization over a log-spaced grid") {
    // max -(log x - log 3)^2 - (log y - log 20)^2 over [0.1, 100]^2.
    const auto objective = [](const Eigen::VectorXd& x) {
        const double u = std::log(x[0]) - std::log(3.0);
        const double v = std::log(x[1]) - std::log(20.0);
        return -u * u - v * v;
    };
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.1, 0.1;
    hi << 100.0, 100.0;
    const auto always = [](const Eigen::VectorXd&) { return true; };
    const BoxOptimum opt = maximize_on_box(objective, lo, hi, always, 100000);
    CHECK(opt.point[0] == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(opt.point[1] == doctest::Approx(20.0).epsilon(1e-3));
    CHECK(opt.value == doctest::Approx(0.0).epsilon(1e-6));

    // Constraints restrict the reachable optimum.
    const auto half = [](const Eigen::VectorXd& x) { return x[0] <= 1.0; };
    const BoxOptimum con = maximize_on_box(objective, lo, hi, half, 100000);
    CHECK(con.point[0] <= 1.0 + 1e-12);
    CHECK(con.value < opt.value);

    const auto never = [](const Eigen::VectorXd&) { return false; };
    CHECK_THROWS_AS(maximize_on_box(objective, lo, hi, never, 100000),
                    InfeasibleRegionError);
}

TEST_CASE("grid maximization handles boxes that include zero") {
    // max x*(2-x) + y*(1-y) over [0, 2] x [0, 1]: 1.25 at (1, 0.5).
    const auto objective = [](const Eigen::VectorXd& x) {
        return x[0] * (2.0 - x[0]) + x[1] * (1.0 - x[1]);
    };
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 2.0, 1.0;
    const BoxOptimum opt =
        maximize_on_grid(objective, lo, hi, {9, 9}, 1e-6, 100000);
    CHECK(opt.value == doctest::Approx(1.25).epsilon(1e-8));
    CHECK(opt.point[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(opt.point[1] == doctest::Approx(0.5).epsilon(1e-3));

    // A boundary optimum is reachable exactly.
    const auto edge = [](const Eigen::VectorXd& x) { return x[0] - x[1]; };
    const BoxOptimum b = maximize_on_grid(edge, lo, hi, {5, 5}, 1e-6, 100000);
    CHECK(b.point[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(b.point[1] == doctest::Approx(0.0).epsilon(1e-9));
}
