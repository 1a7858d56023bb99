#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uplink/hermitian.hpp"

namespace uplink {

/// scale * log2 det(I + Num Den^{-1}), evaluated as det(Den + Num) / det(Den).
/// Num must be PSD and Den positive definite (min eigenvalue > 1e-12);
/// the result is therefore nonnegative.
double logdet_form(const HermitianM2& num, const HermitianM2& den, double scale);

/// Unique positive root of a x^2 + b x + c with a > 0 and c < 0.
double positive_quadratic_root(double a, double b, double c);

/// Point on the probability simplex: nonnegative weights summing to one
/// (within 1e-12, checked at construction).
class SimplexPoint {
  public:
    explicit SimplexPoint(Eigen::VectorXd weights);

    /// All mass on one coordinate (0-based).
    static SimplexPoint single(int size, int index);

    const Eigen::VectorXd& weights() const { return w_; }
    double operator[](int i) const { return w_[i]; }
    int size() const { return static_cast<int>(w_.size()); }

  private:
    Eigen::VectorXd w_;
};

/// Subset of the five power layers allowed to carry mass. Layer 1 (the one
/// decoded in every backhaul state) is always a member.
class SchemeMask {
  public:
    static SchemeMask of(std::initializer_list<int> layers);
    static SchemeMask parse(const std::string& label);  // e.g. "1+2+5"

    bool contains(int layer) const;          ///< 1-based layer index
    std::vector<int> layers() const;         ///< ascending, 1-based
    std::string label() const;               ///< "1+2+5"
    int count() const;

  private:
    std::array<bool, 5> allowed_{};
};

struct SimplexOptimum {
    SimplexPoint point;
    double value;
    long evaluations;
};

/// Deterministic maximization over the masked simplex: exhaustive grid of
/// pitch 0.05, then pattern-search refinement down to pitch 1e-4. Ties keep
/// the first point in enumeration order; `budget` caps objective calls.
SimplexOptimum maximize_on_simplex(
    const std::function<double(const SimplexPoint&)>& objective,
    const SchemeMask& mask, long budget);

struct BoxOptimum {
    Eigen::VectorXd point;
    double value;
    long evaluations;
};

/// Deterministic maximization over [lower, upper] (elementwise, lower > 0):
/// 32 logarithmically spaced points per axis, then pattern search in log
/// space. Infeasible points are skipped without evaluating the objective;
/// if no grid point is feasible an InfeasibleRegionError is thrown.
BoxOptimum maximize_on_box(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
    const std::function<bool(const Eigen::VectorXd&)>& feasible, long budget);

/// Linear-space variant used for searches whose boxes include zero:
/// `counts[d]` grid points per axis, then pattern search down to `min_step`.
BoxOptimum maximize_on_grid(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
    const std::vector<int>& counts, double min_step, long budget);

}  // namespace uplink
