#include "uplink/cli/verify_runner.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "uplink/model.hpp"
#include "uplink/nonfading.hpp"
#include "uplink/numerics.hpp"
#include "uplink/oracle.hpp"
#include "uplink/rng.hpp"

namespace uplink::cli {

namespace {

using nlohmann::json;

/// Description-rate identities mix analytic targets of different scale:
/// rate equalities hold to 1e-9 (separate) and 1e-8 (joint, which rests on
/// a quadratic root), the determinant identity to 1e-8 relative.
double backhaul_tolerance(const oracle::CheckEntry& e) {
    if (e.label.find("determinant") != std::string::npos) {
        return 1e-8 * std::max(1.0, std::abs(e.expected));
    }
    return e.label.rfind("joint", 0) == 0 ? 1e-8 : 1e-9;
}

struct Section {
    long checks = 0;
    long failed = 0;
    double max_deviation = 0.0;
    json failures = json::array();

    void add(const oracle::CheckReport& report,
             double (*tolerance)(const oracle::CheckEntry&),
             const std::string& context) {
        for (const auto& e : report.entries) {
            ++checks;
            max_deviation = std::max(max_deviation, e.deviation());
            if (e.deviation() > tolerance(e)) {
                ++failed;
                if (failures.size() < 20) {
                    failures.push_back({{"context", context},
                                        {"label", e.label},
                                        {"expected", e.expected},
                                        {"actual", e.actual},
                                        {"deviation", e.deviation()}});
                }
            }
        }
    }

    json to_json() const {
        return {{"checks", checks},
                {"failed", failed},
                {"max_deviation", max_deviation},
                {"failures", failures}};
    }
};

double fixed_tol_1e9(const oracle::CheckEntry&) { return 1e-9; }

SystemParams random_params(std::uint64_t seed, std::uint64_t index) {
    const auto u = [&](std::uint32_t slot) {
        return uniform01(seed, {index, slot, RngStream::params});
    };
    // Power log-uniform over [0.5, 200]; capacities kept away from zero so
    // the coarse description stays nondegenerate.
    const double power = 0.5 * std::pow(400.0, u(0));
    const double alpha = u(1);
    const double cap_low = 0.25 + 3.75 * u(2);
    const double cap_delta = 4.0 * u(3);
    return SystemParams(power, alpha, cap_low, cap_delta, 0.1);
}

SimplexPoint random_lambda(std::uint64_t seed, std::uint64_t index) {
    Eigen::VectorXd w(5);
    double sum = 0.0;
    for (std::uint32_t k = 0; k < 5; ++k) {
        // Exponential spacings give a uniform point on the simplex.
        const double u = uniform01(seed, {index, k, RngStream::weights});
        w[k] = -std::log1p(-std::min(u, 1.0 - 1e-16));
        sum += w[k];
    }
    if (sum <= 0.0) return SimplexPoint(Eigen::VectorXd::Constant(5, 0.2));
    return SimplexPoint(w / sum);
}

std::string describe(const SystemParams& p) {
    return "P=" + std::to_string(p.power) + " alpha=" + std::to_string(p.alpha) +
           " C=" + std::to_string(p.cap_low) + " dC=" + std::to_string(p.cap_delta);
}

const char* state_name(BackhaulState s) {
    switch (s) {
        case BackhaulState::low_low: return "low_low";
        case BackhaulState::high_low: return "high_low";
        case BackhaulState::low_high: return "low_high";
        case BackhaulState::high_high: return "high_high";
    }
    return "?";
}

void check_layer_point(Section& bounds, Section& backhaul, json& variants,
                       const SystemParams& params, const SimplexPoint& lambda,
                       const std::string& context) {
    for (const auto mode :
         {DecompressionMode::separate, DecompressionMode::joint}) {
        const std::string mode_name =
            mode == DecompressionMode::separate ? "separate" : "joint";
        bounds.add(oracle::verify_layer_bounds(params, lambda, mode),
                   fixed_tol_1e9, context + " " + mode_name);

        const auto split = oracle::layer5_conditioning(params, lambda, mode);
        oracle::CheckReport top;
        top.entries.push_back({"fifth layer, all lower layers decoded",
                               split.closed_form, split.all_layers});
        bounds.add(top, fixed_tol_1e9, context + " " + mode_name);
        if (variants.size() < 8) {
            variants.push_back(
                {{"context", context + " " + mode_name},
                 {"closed_form", split.closed_form},
                 {"all_layers", split.all_layers},
                 {"layers34_only", split.layers34_only},
                 {"gap", split.closed_form - split.layers34_only}});
        }
    }
    backhaul.add(oracle::verify_backhaul(params), backhaul_tolerance, context);
}

void check_fading_point(Section& regions, const SystemParams& params,
                        const ChannelGains& gains, double lambda2,
                        const std::string& context) {
    for (const BackhaulState s : kBackhaulStates) {
        regions.add(oracle::verify_fading_regions(params, gains, lambda2, s),
                    fixed_tol_1e9, context + " " + state_name(s));
    }
}

}  // namespace

VerifyOutcome run_verify(VerifyLevel level, std::uint64_t seed) {
    Section bounds, backhaul, regions, sampler;
    json variants = json::array();

    const SystemParams canonical_nf(10.0, 0.3, 1.0, 0.5, 0.1);
    const SystemParams canonical_fading(1000.0, 0.3, 4.0, 6.0, 0.2);

    const std::vector<SimplexPoint> quick_lambdas = {
        SimplexPoint(Eigen::VectorXd::Constant(5, 0.2)),
        SimplexPoint((Eigen::VectorXd(5) << 0.4, 0.3, 0.1, 0.1, 0.1).finished()),
        SimplexPoint((Eigen::VectorXd(5) << 0.5, 0.3, 0.0, 0.0, 0.2).finished()),
    };
    for (std::size_t i = 0; i < quick_lambdas.size(); ++i) {
        check_layer_point(bounds, backhaul, variants, canonical_nf,
                          quick_lambdas[i], "canonical lambda" + std::to_string(i));
    }
    check_layer_point(bounds, backhaul, variants,
                      SystemParams(10.0, 0.7, 2.0, 1.0, 0.1), quick_lambdas[0],
                      "strong coupling");

    check_fading_point(regions, canonical_fading, ChannelGains::unit(), 0.3,
                       "unit gains");
    for (std::uint64_t i = 0; i < 2; ++i) {
        check_fading_point(regions, canonical_fading, sample_gains(seed, i),
                           0.2 + 0.3 * static_cast<double>(i),
                           "gain draw " + std::to_string(i));
    }

    {
        const auto gs = oracle::assemble_nonfading(
            canonical_nf, quick_lambdas[0], sigma_separate(canonical_nf));
        const auto gf =
            oracle::assemble_fading(canonical_fading, ChannelGains::unit(), 0.3);
        oracle::CheckReport draws;
        draws.entries.push_back(
            {"sample covariance, transmit chain", 0.0,
             oracle::sample_covariance_deviation(gs, 20000, seed)});
        draws.entries.push_back(
            {"sample covariance, fading chain", 0.0,
             oracle::sample_covariance_deviation(gf, 20000, seed)});
        // Entries are O(1/sqrt(n)) sample means; 0.08 is an 8 sigma cap.
        sampler.add(draws, [](const oracle::CheckEntry&) { return 0.08; },
                    "20000 draws");
    }

    if (level == VerifyLevel::full) {
        for (std::uint64_t i = 0; i < 100; ++i) {
            const SystemParams params = random_params(seed, i);
            check_layer_point(bounds, backhaul, variants, params,
                              random_lambda(seed, i),
                              "draw " + std::to_string(i) + " " + describe(params));
        }
        for (std::uint64_t i = 0; i < 1000; ++i) {
            const double lambda2 =
                0.98 * uniform01(seed, {i, 7, RngStream::params}) + 0.01;
            check_fading_point(regions, canonical_fading,
                               sample_gains(seed, 100 + i), lambda2,
                               "gain draw " + std::to_string(100 + i));
        }
    }

    const bool pass = bounds.failed == 0 && backhaul.failed == 0 &&
                      regions.failed == 0 && sampler.failed == 0;
    json report = {
        {"level", level == VerifyLevel::full ? "full" : "quick"},
        {"seed", seed},
        {"pass", pass},
        {"sections",
         {{"layer_bounds", bounds.to_json()},
          {"description_rates", backhaul.to_json()},
          {"fading_regions", regions.to_json()},
          {"sampler", sampler.to_json()}}},
        {"fifth_layer_conditioning_variants", variants},
    };
    return {pass, report.dump(2) + "\n"};
}

}  // namespace uplink::cli
