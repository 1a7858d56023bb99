#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Core>

namespace uplink {

/// 2x2 Hermitian matrix [[d1, off], [conj(off), d2]].
struct HermitianM2 {
    double d1 = 0.0;
    double d2 = 0.0;
    std::complex<double> off{0.0, 0.0};

    static HermitianM2 zero() { return {}; }
    static HermitianM2 identity(double s = 1.0) { return {s, s, {}}; }
    static HermitianM2 diagonal(double a, double b) { return {a, b, {}}; }

    /// Rank-1 outer product v v^H for v = (x, y).
    static HermitianM2 outer(std::complex<double> x, std::complex<double> y) {
        return {std::norm(x), std::norm(y), x * std::conj(y)};
    }

    double trace() const { return d1 + d2; }
    double det() const { return d1 * d2 - std::norm(off); }

    /// Eigenvalues in ascending order.
    std::pair<double, double> eigenvalues() const {
        const double mean = 0.5 * (d1 + d2);
        const double radius = std::sqrt(0.25 * (d1 - d2) * (d1 - d2) + std::norm(off));
        return {mean - radius, mean + radius};
    }

    bool is_psd(double tol = 1e-12) const { return eigenvalues().first >= -tol; }

    Eigen::Matrix2cd matrix() const {
        Eigen::Matrix2cd m;
        m << std::complex<double>(d1, 0.0), off,
             std::conj(off), std::complex<double>(d2, 0.0);
        return m;
    }

    HermitianM2& operator+=(const HermitianM2& o) {
        d1 += o.d1;
        d2 += o.d2;
        off += o.off;
        return *this;
    }
};

inline HermitianM2 operator+(HermitianM2 a, const HermitianM2& b) { return a += b; }

inline HermitianM2 operator*(double s, const HermitianM2& m) {
    return {s * m.d1, s * m.d2, s * m.off};
}

}  // namespace uplink
