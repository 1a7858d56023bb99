#include "uplink/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "uplink/errors.hpp"
#include "uplink/rng.hpp"

namespace uplink::oracle {

namespace {

using Cd = std::complex<double>;

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& m, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
    Eigen::MatrixXcd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                m(rows[i], cols[k]);
        }
    }
    return out;
}

/// Residual covariance of the `b` block given the `c` block, through the
/// spectral pseudo-inverse of the conditioning block. Null directions of the
/// conditioning block are a.s. constant, so dropping them is exact (their
/// cross covariance vanishes); no regularization bias enters.
Eigen::MatrixXcd conditional_cov(const Eigen::MatrixXcd& cov,
                                 const std::vector<int>& b,
                                 const std::vector<int>& c) {
    Eigen::MatrixXcd sbb = submatrix(cov, b, b);
    if (c.empty()) return sbb;
    const Eigen::MatrixXcd scc = submatrix(cov, c, c);
    const Eigen::MatrixXcd sbc = submatrix(cov, b, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(scc);
    const double cutoff =
        1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
    Eigen::MatrixXcd reduction = sbb;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] <= cutoff) continue;
        const Eigen::VectorXcd w = sbc * es.eigenvectors().col(i);
        reduction -= (w * w.adjoint()) / es.eigenvalues()[i];
    }
    return reduction;
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double log2_det(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        sum += std::log2(es.eigenvalues()[i]);
    }
    return sum;
}

}  // namespace

JointGaussian::JointGaussian(Domain domain, std::vector<std::string> labels,
                             Eigen::MatrixXcd coeffs,
                             Eigen::VectorXd primitive_variances)
    : domain_(domain), labels_(std::move(labels)), coeffs_(std::move(coeffs)),
      prim_var_(std::move(primitive_variances)) {
    if (coeffs_.rows() != static_cast<Eigen::Index>(labels_.size()) ||
        coeffs_.cols() != prim_var_.size()) {
        throw std::invalid_argument("coefficient matrix shape mismatch");
    }
    if ((prim_var_.array() < 0.0).any()) {
        throw std::invalid_argument("primitive variances must be nonnegative");
    }
    cov_ = coeffs_ * prim_var_.asDiagonal() * coeffs_.adjoint();
    // The product is Hermitian up to rounding; symmetrize so later
    // eigensolves see an exactly Hermitian matrix.
    cov_ = 0.5 * (cov_ + Eigen::MatrixXcd(cov_.adjoint()));
}

int JointGaussian::index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw std::invalid_argument("unknown variable label: " + label);
    }
    return static_cast<int>(it - labels_.begin());
}

Eigen::VectorXcd JointGaussian::sample(std::uint64_t seed,
                                       std::uint64_t index) const {
    Eigen::VectorXcd prim(prim_var_.size());
    for (Eigen::Index k = 0; k < prim.size(); ++k) {
        const DrawKey key{index, static_cast<std::uint32_t>(k),
                          RngStream::covariance};
        const double sd = std::sqrt(prim_var_[k]);
        if (domain_ == Domain::real) {
            prim[k] = Cd(sd * normal_pair(seed, key).first, 0.0);
        } else {
            prim[k] = sd * complex_normal(seed, key);
        }
    }
    return coeffs_ * prim;
}

double gaussian_mi(const JointGaussian& g, const std::vector<std::string>& a,
                   const std::vector<std::string>& b,
                   const std::vector<std::string>& c) {
    std::vector<int> ib, ic, iac;
    for (const auto& label : b) ib.push_back(g.index_of(label));
    for (const auto& label : c) ic.push_back(g.index_of(label));
    iac = ic;
    for (const auto& label : a) iac.push_back(g.index_of(label));

    // Restrict the target block to its support: an a.s. constant direction
    // (a zero-power layer, say) carries no information but would send both
    // log-determinants to -inf.
    const Eigen::MatrixXcd sbb = submatrix(g.covariance(), ib, ib);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sbb);
    const double support_floor =
        1e-12 * std::max(1.0, sbb.diagonal().real().sum());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] > support_floor) keep.push_back(i);
    }
    if (keep.empty()) return 0.0;
    Eigen::MatrixXcd basis(sbb.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        basis.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(keep[i]);
    }

    const Eigen::MatrixXcd given_c =
        basis.adjoint() * conditional_cov(g.covariance(), ib, ic) * basis;
    const Eigen::MatrixXcd given_ac =
        basis.adjoint() * conditional_cov(g.covariance(), ib, iac) * basis;

    const double floor =
        1e-12 * std::max(1.0, given_ac.diagonal().real().sum());
    if (min_eigenvalue(given_ac) <= floor) {
        throw SingularCovarianceError(
            "mutual information diverges: target block is determined by the "
            "conditioning variables");
    }
    double value = g.mi_scale() * (log2_det(given_c) - log2_det(given_ac));
    if (value < 0.0 && value > -1e-9) value = 0.0;
    return value;
}

JointGaussian assemble_nonfading(const SystemParams& p, const SimplexPoint& lambda,
                                 const CompressionNoises& noises) {
    if (lambda.size() != 5) {
        throw std::invalid_argument("lambda must have 5 layers");
    }
    // Primitives: W11..W15, W21..W25, Z1, Z2, Q11, Q12, Q21, Q22.
    constexpr int kPrims = 16;
    const int z1 = 10, z2 = 11, q11 = 12, q12 = 13, q21 = 14, q22 = 15;
    Eigen::VectorXd var = Eigen::VectorXd::Ones(kPrims);
    var[q11] = noises.sigma1_sq;
    var[q12] = noises.sigma2_sq;
    var[q21] = noises.sigma1_sq;
    var[q22] = noises.sigma2_sq;

    std::vector<std::string> labels = {"W11", "W12", "W13", "W14", "W15",
                                       "W21", "W22", "W23", "W24", "W25",
                                       "X1",  "X2",  "Y1",  "Y2",
                                       "V11", "V12", "V21", "V22"};
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(18, kPrims);
    for (int k = 0; k < 5; ++k) {
        m(k, k) = 1.0;       // W1k
        m(5 + k, 5 + k) = 1.0;  // W2k
    }
    Eigen::RowVectorXcd x1 = Eigen::RowVectorXcd::Zero(kPrims);
    Eigen::RowVectorXcd x2 = Eigen::RowVectorXcd::Zero(kPrims);
    for (int k = 0; k < 5; ++k) {
        const double coeff = std::sqrt(p.power * lambda[k]);
        x1[k] = coeff;
        x2[5 + k] = coeff;
    }
    m.row(10) = x1;
    m.row(11) = x2;
    Eigen::RowVectorXcd y1 = x1 + p.alpha * x2;
    Eigen::RowVectorXcd y2 = p.alpha * x1 + x2;
    y1[z1] = 1.0;
    y2[z2] = 1.0;
    m.row(12) = y1;
    m.row(13) = y2;
    m.row(14) = y1;
    m.row(14)[q11] = 1.0;
    m.row(14)[q12] = 1.0;
    m.row(15) = y1;
    m.row(15)[q12] = 1.0;
    m.row(16) = y2;
    m.row(16)[q21] = 1.0;
    m.row(16)[q22] = 1.0;
    m.row(17) = y2;
    m.row(17)[q22] = 1.0;
    return JointGaussian(Domain::real, std::move(labels), std::move(m),
                         std::move(var));
}

JointGaussian assemble_fading(const SystemParams& p, const ChannelGains& g,
                              double lambda2) {
    if (!(lambda2 >= 0.0 && lambda2 <= 1.0)) {
        throw std::invalid_argument("layer-2 power share must be in [0, 1]");
    }
    const FadingNoises noises = fading_noises(p, g);
    // Primitives: W11, W12, W21, W22, Z1, Z2, Q11, Q12, Q21, Q22.
    constexpr int kPrims = 10;
    const int z1 = 4, z2 = 5, q11 = 6, q12 = 7, q21 = 8, q22 = 9;
    Eigen::VectorXd var = Eigen::VectorXd::Ones(kPrims);
    var[q11] = noises.s1_coarse;
    var[q12] = noises.s1_refined;
    var[q21] = noises.s2_coarse;
    var[q22] = noises.s2_refined;

    std::vector<std::string> labels = {"W11", "W12", "W21", "W22", "X1", "X2",
                                       "Y1",  "Y2",  "V11", "V12", "V21", "V22"};
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(12, kPrims);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 2) = 1.0;
    m(3, 3) = 1.0;
    Eigen::RowVectorXcd x1 = Eigen::RowVectorXcd::Zero(kPrims);
    Eigen::RowVectorXcd x2 = Eigen::RowVectorXcd::Zero(kPrims);
    x1[0] = std::sqrt(p.power * (1.0 - lambda2));
    x1[1] = std::sqrt(p.power * lambda2);
    x2[2] = std::sqrt(p.power * (1.0 - lambda2));
    x2[3] = std::sqrt(p.power * lambda2);
    m.row(4) = x1;
    m.row(5) = x2;
    Eigen::RowVectorXcd y1 = g.a11 * x1 + p.alpha * g.a12 * x2;
    Eigen::RowVectorXcd y2 = p.alpha * g.a21 * x1 + g.a22 * x2;
    y1[z1] = 1.0;
    y2[z2] = 1.0;
    m.row(6) = y1;
    m.row(7) = y2;
    m.row(8) = y1;
    m.row(8)[q11] = 1.0;
    m.row(8)[q12] = 1.0;
    m.row(9) = y1;
    m.row(9)[q12] = 1.0;
    m.row(10) = y2;
    m.row(10)[q21] = 1.0;
    m.row(10)[q22] = 1.0;
    m.row(11) = y2;
    m.row(11)[q22] = 1.0;
    return JointGaussian(Domain::complex_proper, std::move(labels), std::move(m),
                         std::move(var));
}

double CheckEntry::deviation() const { return std::abs(expected - actual); }

double CheckReport::max_deviation() const {
    double worst = 0.0;
    for (const auto& e : entries) worst = std::max(worst, e.deviation());
    return worst;
}

CheckReport verify_layer_bounds(const SystemParams& p, const SimplexPoint& lambda,
                                DecompressionMode mode) {
    const CompressionNoises noises =
        mode == DecompressionMode::separate ? sigma_separate(p) : sigma_joint(p);
    const LayerBounds bounds = layer_bounds(p, lambda, noises);
    const JointGaussian g = assemble_nonfading(p, lambda, noises);

    // Received description pairs: both coarse, link 1 refined, link 2
    // refined, both refined.
    const std::vector<std::string> rx_ll = {"V11", "V21"};
    const std::vector<std::string> rx_hl = {"V12", "V21"};
    const std::vector<std::string> rx_lh = {"V11", "V22"};
    const std::vector<std::string> rx_hh = {"V12", "V22"};
    const std::vector<std::string> layers12 = {"W11", "W21", "W12", "W22"};

    auto with = [](std::vector<std::string> base,
                   std::initializer_list<const char*> more) {
        for (const char* s : more) base.emplace_back(s);
        return base;
    };

    CheckReport r;
    r.entries = {
        {"layer1 both coarse", bounds.a, gaussian_mi(g, {"W11", "W21"}, rx_ll)},
        {"layer2 link1 refined", bounds.b,
         gaussian_mi(g, {"W12", "W22"}, rx_hl, {"W11", "W21"})},
        {"layer2 link2 refined", bounds.b,
         gaussian_mi(g, {"W12", "W22"}, rx_lh, {"W11", "W21"})},
        {"layer3 link1 refined", bounds.c,
         gaussian_mi(g, {"W13"}, rx_hl, with(layers12, {"W24"}))},
        {"layer3 link2 refined", bounds.c,
         gaussian_mi(g, {"W23"}, rx_lh, with(layers12, {"W14"}))},
        {"layer4 link1 refined", bounds.d,
         gaussian_mi(g, {"W24"}, rx_hl, with(layers12, {"W13"}))},
        {"layer4 link2 refined", bounds.d,
         gaussian_mi(g, {"W14"}, rx_lh, with(layers12, {"W23"}))},
        {"layer34 sum link1 refined", bounds.e,
         gaussian_mi(g, {"W13", "W24"}, rx_hl, layers12)},
        {"layer34 sum link2 refined", bounds.e,
         gaussian_mi(g, {"W23", "W14"}, rx_lh, layers12)},
        {"layer5 both refined", bounds.f,
         gaussian_mi(g, {"W15", "W25"}, rx_hh,
                     with(layers12, {"W13", "W23", "W14", "W24"}))},
    };
    return r;
}

Layer5Conditioning layer5_conditioning(const SystemParams& p,
                                       const SimplexPoint& lambda,
                                       DecompressionMode mode) {
    const CompressionNoises noises =
        mode == DecompressionMode::separate ? sigma_separate(p) : sigma_joint(p);
    const JointGaussian g = assemble_nonfading(p, lambda, noises);
    const std::vector<std::string> rx_hh = {"V12", "V22"};
    Layer5Conditioning out;
    out.closed_form = layer_bounds(p, lambda, noises).f;
    out.all_layers = gaussian_mi(
        g, {"W15", "W25"}, rx_hh,
        {"W11", "W21", "W12", "W22", "W13", "W23", "W14", "W24"});
    out.layers34_only = gaussian_mi(g, {"W15", "W25"}, rx_hh,
                                    {"W13", "W14", "W23", "W24"});
    return out;
}

CheckReport verify_backhaul(const SystemParams& p) {
    CheckReport r;

    const CompressionNoises sep = sigma_separate(p);
    // Power split does not enter the description-rate identities; any valid
    // point works, so spread the power evenly.
    const SimplexPoint lambda(Eigen::VectorXd::Constant(5, 0.2));
    const JointGaussian gs = assemble_nonfading(p, lambda, sep);

    r.entries.push_back({"separate coarse rate link1", p.cap_low,
                         gaussian_mi(gs, {"Y1"}, {"V11"})});
    r.entries.push_back({"separate coarse rate link2", p.cap_low,
                         gaussian_mi(gs, {"Y2"}, {"V21"})});
    if (p.cap_delta > 0.0) {
        r.entries.push_back({"separate refinement rate link1", p.cap_delta,
                             gaussian_mi(gs, {"Y1"}, {"V12"}, {"V11"})});
        r.entries.push_back({"separate refinement rate link2", p.cap_delta,
                             gaussian_mi(gs, {"Y2"}, {"V22"}, {"V21"})});
    }

    const CompressionNoises joint = sigma_joint(p);
    const JointGaussian gj = assemble_nonfading(p, lambda, joint);
    const double s = joint.sum();
    const int v11 = gj.index_of("V11");
    const int v21 = gj.index_of("V21");
    Eigen::Matrix2cd pair_cov;
    pair_cov << gj.covariance()(v11, v11), gj.covariance()(v11, v21),
        gj.covariance()(v21, v11), gj.covariance()(v21, v21);
    const double sum_rate = 0.5 * std::log2(pair_cov.determinant().real() / (s * s));
    r.entries.push_back({"joint coarse sum rate", 2.0 * p.cap_low, sum_rate});

    const double k = p.power * (1.0 + p.alpha * p.alpha) + 1.0;
    const double det_identity =
        (k + s) * (k + s) - 4.0 * p.alpha * p.alpha * p.power * p.power;
    r.entries.push_back({"joint coarse pair determinant", det_identity,
                         pair_cov.determinant().real()});

    if (p.cap_delta > 0.0) {
        r.entries.push_back({"joint refinement rate link1", p.cap_delta,
                             gaussian_mi(gj, {"Y1"}, {"V12"}, {"V11"})});
        r.entries.push_back({"joint refinement rate link2", p.cap_delta,
                             gaussian_mi(gj, {"Y2"}, {"V22"}, {"V21"})});
    }
    return r;
}

CheckReport verify_fading_regions(const SystemParams& p, const ChannelGains& g,
                                  double lambda2, BackhaulState s) {
    const auto [a1, a2] = gain_matrices_fading(g, p.alpha);
    const auto [f1, f2] = effective_noise(fading_noises(p, g), s);
    const JointGaussian jg = assemble_fading(p, g, lambda2);

    const std::vector<std::string> rx = {link1_high(s) ? "V12" : "V11",
                                         link2_high(s) ? "V22" : "V21"};
    const double P = p.power;

    const JointThresholds j1 = joint_layer_thresholds(1, lambda2, a1, a2, f1, f2, P);
    const JointThresholds j2 = joint_layer_thresholds(2, lambda2, a1, a2, f1, f2, P);
    const SingleThresholds s1 = single_layer1_thresholds(1, lambda2, a1, a2, f1, f2, P);
    const SingleThresholds s2 = single_layer1_thresholds(2, lambda2, a1, a2, f1, f2, P);
    const SingleThresholds b1 =
        second_layer_after_both_thresholds(1, lambda2, a1, a2, f1, f2, P);
    const SingleThresholds b2 =
        second_layer_after_both_thresholds(2, lambda2, a1, a2, f1, f2, P);

    CheckReport r;
    r.entries = {
        {"joint layer1 user1", j1.user1, gaussian_mi(jg, {"W11"}, rx, {"W21"})},
        {"joint layer1 user2", j1.user2, gaussian_mi(jg, {"W21"}, rx, {"W11"})},
        {"joint layer1 sum", j1.sum, gaussian_mi(jg, {"W11", "W21"}, rx)},
        {"joint layer2 user1", j2.user1,
         gaussian_mi(jg, {"W12"}, rx, {"W11", "W21", "W22"})},
        {"joint layer2 user2", j2.user2,
         gaussian_mi(jg, {"W22"}, rx, {"W11", "W21", "W12"})},
        {"joint layer2 sum", j2.sum,
         gaussian_mi(jg, {"W12", "W22"}, rx, {"W11", "W21"})},
        {"single layer1 user1 own", s1.own, gaussian_mi(jg, {"W11"}, rx)},
        {"single layer1 user1 exclusion", s1.other,
         gaussian_mi(jg, {"W21"}, rx, {"W11"})},
        {"single layer1 user2 own", s2.own, gaussian_mi(jg, {"W21"}, rx)},
        {"single layer1 user2 exclusion", s2.other,
         gaussian_mi(jg, {"W11"}, rx, {"W21"})},
        {"after-both layer2 user1 own", b1.own,
         gaussian_mi(jg, {"W12"}, rx, {"W11", "W21"})},
        {"after-both layer2 user1 exclusion", b1.other,
         gaussian_mi(jg, {"W22"}, rx, {"W11", "W21", "W12"})},
        {"after-both layer2 user2 own", b2.own,
         gaussian_mi(jg, {"W22"}, rx, {"W11", "W21"})},
        {"after-both layer2 user2 exclusion", b2.other,
         gaussian_mi(jg, {"W12"}, rx, {"W11", "W21", "W22"})},
        {"after-own layer2 user1",
         second_layer_after_own_threshold(1, lambda2, a1, a2, f1, f2, P),
         gaussian_mi(jg, {"W12"}, rx, {"W11"})},
        {"after-own layer2 user2",
         second_layer_after_own_threshold(2, lambda2, a1, a2, f1, f2, P),
         gaussian_mi(jg, {"W22"}, rx, {"W21"})},
    };
    return r;
}

double sample_covariance_deviation(const JointGaussian& g, long n,
                                   std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample count must be positive");
    const int d = g.size();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
    for (long i = 0; i < n; ++i) {
        const Eigen::VectorXcd x = g.sample(seed, static_cast<std::uint64_t>(i));
        acc += x * x.adjoint();
    }
    acc /= static_cast<double>(n);

    const Eigen::MatrixXcd& cov = g.covariance();
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const double unit = std::sqrt(std::max(1.0, cov(i, i).real()) *
                                          std::max(1.0, cov(k, k).real()));
            worst = std::max(worst, std::abs(acc(i, k) - cov(i, k)) / unit);
        }
    }
    return worst;
}

}  // namespace uplink::oracle
