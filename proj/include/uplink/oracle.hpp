#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uplink/fading.hpp"
#include "uplink/model.hpp"
#include "uplink/nonfading.hpp"
#include "uplink/numerics.hpp"

namespace uplink::oracle {

/// First-principles checks of the closed-form evaluators: the transmit and
/// compression chain is assembled as an explicit joint Gaussian vector and
/// every decoding bound is recomputed as a conditional mutual information.

enum class Domain {
    real,            ///< real signals; mutual information scale 1/2
    complex_proper,  ///< circularly symmetric; scale 1
};

/// Labeled zero-mean jointly Gaussian vector, defined by a coefficient
/// matrix over independent primitives: cov = coeffs diag(var) coeffs^H.
class JointGaussian {
  public:
    JointGaussian(Domain domain, std::vector<std::string> labels,
                  Eigen::MatrixXcd coeffs, Eigen::VectorXd primitive_variances);

    Domain domain() const { return domain_; }
    double mi_scale() const { return domain_ == Domain::real ? 0.5 : 1.0; }
    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const Eigen::MatrixXcd& covariance() const { return cov_; }

    /// Throws std::invalid_argument for an unknown label.
    int index_of(const std::string& label) const;

    /// One draw of the whole vector from the covariance stream at `seed`.
    Eigen::VectorXcd sample(std::uint64_t seed, std::uint64_t index) const;

  private:
    Domain domain_;
    std::vector<std::string> labels_;
    Eigen::MatrixXcd coeffs_;
    Eigen::VectorXd prim_var_;
    Eigen::MatrixXcd cov_;
};

/// I(A; B | C) in bits. Throws SingularCovarianceError when B is (nearly)
/// determined by A and C, where the value diverges.
double gaussian_mi(const JointGaussian& g, const std::vector<std::string>& a,
                   const std::vector<std::string>& b,
                   const std::vector<std::string>& c = {});

/// Five-layer transmit chain, channel, and two-stage descriptions for the
/// non-fading model. Labels: W11..W15, W21..W25, X1, X2, Y1, Y2, V11 (coarse)
/// V12 (refined), V21, V22.
JointGaussian assemble_nonfading(const SystemParams& p, const SimplexPoint& lambda,
                                 const CompressionNoises& noises);

/// Two-layer chain for one fading realization. Labels: W11, W12, W21, W22,
/// X1, X2, Y1, Y2, V11, V12, V21, V22.
JointGaussian assemble_fading(const SystemParams& p, const ChannelGains& g,
                              double lambda2);

struct CheckEntry {
    std::string label;
    double expected;  ///< closed-form value
    double actual;    ///< recomputed from the joint Gaussian
    double deviation() const;
};

struct CheckReport {
    std::vector<CheckEntry> entries;
    double max_deviation() const;
};

/// Recomputes the six layer-decoding bounds as conditional mutual
/// informations, including both mixed backhaul states for the bounds that
/// involve one refined and one coarse description.
CheckReport verify_layer_bounds(const SystemParams& p, const SimplexPoint& lambda,
                                DecompressionMode mode);

/// The fifth-layer bound under two conditioning conventions. Conditioning on
/// every previously decoded layer reproduces the closed form; conditioning
/// on the third and fourth layers only is smaller whenever the first two
/// layers carry power.
struct Layer5Conditioning {
    double closed_form;
    double all_layers;
    double layers34_only;
};
Layer5Conditioning layer5_conditioning(const SystemParams& p,
                                       const SimplexPoint& lambda,
                                       DecompressionMode mode);

/// Description-rate identities: each stage of the separate decompressor
/// consumes exactly its link budget, and the jointly recovered coarse pair
/// consumes exactly the sum budget. Refinement entries are skipped when
/// cap_delta is zero (the refined and coarse descriptions coincide).
CheckReport verify_backhaul(const SystemParams& p);

/// All sixteen decoding-region thresholds for one fading realization and
/// backhaul state, recomputed as mutual informations over the descriptions
/// actually received in that state.
CheckReport verify_fading_regions(const SystemParams& p, const ChannelGains& g,
                                  double lambda2, BackhaulState s);

/// Largest normalized deviation between the model covariance and a sample
/// covariance over n draws; O(1/sqrt(n)) when the sampler is sound.
double sample_covariance_deviation(const JointGaussian& g, long n,
                                   std::uint64_t seed);

}  // namespace uplink::oracle
