#include "uplink/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uplink/errors.hpp"

namespace uplink {

double logdet_form(const HermitianM2& num, const HermitianM2& den, double scale) {
    if (den.eigenvalues().first <= 1e-12)
        throw SingularDenominatorError("denominator is not positive definite");
    if (num.eigenvalues().first < -1e-9 * std::max(1.0, num.trace()))
        throw std::invalid_argument("numerator must be positive semidefinite");
    const double v = scale * std::log2((den + num).det() / den.det());
    // det(Den + Num) >= det(Den) holds exactly; absorb rounding noise.
    return v < 0.0 ? 0.0 : v;
}

double positive_quadratic_root(double a, double b, double c) {
    if (!(a > 0.0) || !(c < 0.0))
        throw NoPositiveRootError("need a > 0 and c < 0 for a unique positive root");
    const double disc = b * b - 4.0 * a * c;
    // c < 0 makes disc > b^2, so the square root dominates |b|.
    const double sq = std::sqrt(disc);
    const double q = b >= 0.0 ? -0.5 * (b + sq) : -0.5 * (b - sq);
    const double r1 = q / a;
    const double r2 = c / q;
    return std::max(r1, r2);
}

SimplexPoint::SimplexPoint(Eigen::VectorXd weights) : w_(std::move(weights)) {
    if (w_.size() == 0) throw std::invalid_argument("empty simplex point");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
        if (!(w_[i] >= 0.0)) throw std::invalid_argument("negative simplex weight");
        sum += w_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("simplex weights must sum to 1");
}

SimplexPoint SimplexPoint::single(int size, int index) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(size);
    w[index] = 1.0;
    return SimplexPoint(std::move(w));
}

SchemeMask SchemeMask::of(std::initializer_list<int> layers) {
    SchemeMask m;
    for (int l : layers) {
        if (l < 1 || l > 5) throw std::invalid_argument("layer index out of range");
        m.allowed_[l - 1] = true;
    }
    if (!m.allowed_[0]) throw std::invalid_argument("layer 1 must be in every mask");
    return m;
}

SchemeMask SchemeMask::parse(const std::string& label) {
    SchemeMask m;
    int have = 0;
    for (char ch : label) {
        if (ch == '+' || ch == ' ') continue;
        if (ch < '1' || ch > '5') throw std::invalid_argument("bad scheme label: " + label);
        m.allowed_[ch - '1'] = true;
        ++have;
    }
    if (have == 0 || !m.allowed_[0])
        throw std::invalid_argument("scheme must include layer 1: " + label);
    return m;
}

bool SchemeMask::contains(int layer) const {
    return layer >= 1 && layer <= 5 && allowed_[layer - 1];
}

std::vector<int> SchemeMask::layers() const {
    std::vector<int> out;
    for (int l = 1; l <= 5; ++l)
        if (allowed_[l - 1]) out.push_back(l);
    return out;
}

std::string SchemeMask::label() const {
    std::string out;
    for (int l : layers()) {
        if (!out.empty()) out += '+';
        out += static_cast<char>('0' + l);
    }
    return out;
}

int SchemeMask::count() const {
    return static_cast<int>(layers().size());
}

namespace {

// Tracks the incumbent under a strict-improvement rule, so ties keep the
// earliest point in enumeration order.
struct Incumbent {
    Eigen::VectorXd point;
    double value = 0.0;
    bool set = false;

    void offer(const Eigen::VectorXd& p, double v) {
        if (!set || v > value) {
            point = p;
            value = v;
            set = true;
        }
    }
};

}  // namespace

SimplexOptimum maximize_on_simplex(
    const std::function<double(const SimplexPoint&)>& objective,
    const SchemeMask& mask, long budget) {
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    const std::vector<int> act = mask.layers();
    const int k = static_cast<int>(act.size());

    long used = 0;
    Incumbent best;
    auto eval = [&](Eigen::VectorXd w5) -> bool {
        if (used >= budget) return false;
        ++used;
        w5 /= w5.sum();
        best.offer(w5, objective(SimplexPoint(w5)));
        return true;
    };

    // Exhaustive pitch-0.05 grid over the masked coordinates, enumerated in
    // lexicographic order.
    constexpr int kLevels = 20;
    std::vector<int> comp(k, 0);
    std::function<bool(int, int)> walk = [&](int pos, int remaining) -> bool {
        if (pos == k - 1) {
            comp[pos] = remaining;
            Eigen::VectorXd w = Eigen::VectorXd::Zero(5);
            for (int i = 0; i < k; ++i) w[act[i] - 1] = comp[i] / double(kLevels);
            return eval(w);
        }
        for (int c = 0; c <= remaining; ++c) {
            comp[pos] = c;
            if (!walk(pos + 1, remaining - c)) return false;
        }
        return true;
    };
    walk(0, kLevels);

    // Pattern search: move mass `delta` between coordinate pairs, accept the
    // best strict improvement, halve delta when none exists.
    double delta = 0.05;
    while (delta >= 1e-4 && used < budget && k > 1) {
        Incumbent step;
        for (int i = 0; i < k && used < budget; ++i) {
            for (int j = 0; j < k && used < budget; ++j) {
                if (i == j || best.point[act[j] - 1] <= 0.0) continue;
                Eigen::VectorXd c = best.point;
                const double moved = std::min(delta, c[act[j] - 1]);
                c[act[i] - 1] += moved;
                c[act[j] - 1] -= moved;
                if (c[act[j] - 1] < 0.0) c[act[j] - 1] = 0.0;
                ++used;
                c /= c.sum();
                step.offer(c, objective(SimplexPoint(c)));
            }
        }
        if (step.set && step.value > best.value) {
            best.point = step.point;
            best.value = step.value;
        } else {
            delta *= 0.5;
        }
    }

    return {SimplexPoint(best.point), best.value, used};
}

namespace {

struct BoxSearch {
    const std::function<double(const Eigen::VectorXd&)>& objective;
    const std::function<bool(const Eigen::VectorXd&)>& feasible;
    const Eigen::VectorXd& lower;
    const Eigen::VectorXd& upper;
    long budget;
    long used = 0;
    Incumbent best;

    bool eval(const Eigen::VectorXd& x) {
        if (used >= budget) return false;
        if (!feasible(x)) return true;  // skipped, not charged
        ++used;
        best.offer(x, objective(x));
        return true;
    }

    // Cartesian product of per-axis grids in lexicographic order.
    void grid(const std::vector<std::vector<double>>& axes) {
        const int dim = static_cast<int>(axes.size());
        std::vector<int> idx(dim, 0);
        Eigen::VectorXd x(dim);
        while (true) {
            for (int d = 0; d < dim; ++d) x[d] = axes[d][idx[d]];
            if (!eval(x)) return;
            int d = dim - 1;
            while (d >= 0 && ++idx[d] == static_cast<int>(axes[d].size())) {
                idx[d] = 0;
                --d;
            }
            if (d < 0) return;
        }
    }

    // Coordinate pattern search with per-axis steps, halving on failure.
    void refine(Eigen::VectorXd step, const Eigen::VectorXd& min_step) {
        const int dim = static_cast<int>(step.size());
        while (used < budget) {
            if ((step.array() < min_step.array()).all()) return;
            Incumbent trial;
            for (int d = 0; d < dim && used < budget; ++d) {
                for (double sgn : {+1.0, -1.0}) {
                    Eigen::VectorXd c = best.point;
                    c[d] = std::clamp(c[d] + sgn * step[d], lower[d], upper[d]);
                    if (c[d] == best.point[d]) continue;
                    if (used >= budget) break;
                    if (!feasible(c)) continue;
                    ++used;
                    trial.offer(c, objective(c));
                }
            }
            if (trial.set && trial.value > best.value) {
                best.point = trial.point;
                best.value = trial.value;
            } else {
                step *= 0.5;
            }
        }
    }
};

}  // namespace

BoxOptimum maximize_on_box(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
    const std::function<bool(const Eigen::VectorXd&)>& feasible, long budget) {
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    const int dim = static_cast<int>(lower.size());
    for (int d = 0; d < dim; ++d)
        if (!(lower[d] > 0.0) || !(upper[d] > lower[d]))
            throw std::invalid_argument("need 0 < lower < upper for log spacing");

    // The search runs in log10 coordinates so the grid and the pattern steps
    // are scale free.
    constexpr int kPoints = 32;
    std::vector<std::vector<double>> axes(dim);
    for (int d = 0; d < dim; ++d) {
        const double lo = std::log10(lower[d]);
        const double hi = std::log10(upper[d]);
        for (int i = 0; i < kPoints; ++i)
            axes[d].push_back(lo + (hi - lo) * i / double(kPoints - 1));
    }

    auto obj_log = [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d) x[d] = std::pow(10.0, t[d]);
        return objective(x);
    };
    auto feas_log = [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d) x[d] = std::pow(10.0, t[d]);
        return feasible(x);
    };

    Eigen::VectorXd tlo(dim), thi(dim);
    for (int d = 0; d < dim; ++d) {
        tlo[d] = std::log10(lower[d]);
        thi[d] = std::log10(upper[d]);
    }

    BoxSearch search{obj_log, feas_log, tlo, thi, budget};
    search.grid(axes);
    if (!search.best.set)
        throw InfeasibleRegionError("no grid point satisfies the feasibility predicate");

    Eigen::VectorXd step(dim), min_step(dim);
    for (int d = 0; d < dim; ++d) {
        step[d] = (thi[d] - tlo[d]) / double(kPoints - 1);
        min_step[d] = 1e-7;
    }
    search.refine(step, min_step);

    Eigen::VectorXd point(dim);
    for (int d = 0; d < dim; ++d) point[d] = std::pow(10.0, search.best.point[d]);
    return {point, search.best.value, search.used};
}

BoxOptimum maximize_on_grid(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
    const std::vector<int>& counts, double min_step, long budget) {
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    const int dim = static_cast<int>(lower.size());
    if (static_cast<int>(counts.size()) != dim)
        throw std::invalid_argument("counts size must match dimension");

    std::vector<std::vector<double>> axes(dim);
    for (int d = 0; d < dim; ++d) {
        if (counts[d] < 2) throw std::invalid_argument("need >= 2 points per axis");
        for (int i = 0; i < counts[d]; ++i)
            axes[d].push_back(lower[d] + (upper[d] - lower[d]) * i / double(counts[d] - 1));
    }

    static const std::function<bool(const Eigen::VectorXd&)> kAlways =
        [](const Eigen::VectorXd&) { return true; };

    BoxSearch search{objective, kAlways, lower, upper, budget};
    search.grid(axes);

    Eigen::VectorXd step(dim), floor_step(dim);
    for (int d = 0; d < dim; ++d) {
        step[d] = 0.5 * (upper[d] - lower[d]) / double(counts[d] - 1);
        floor_step[d] = min_step;
    }
    search.refine(step, floor_step);
    return {search.best.point, search.best.value, search.used};
}

}  // namespace uplink
