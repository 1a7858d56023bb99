#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uplink/cli/config.hpp"
#include "uplink/model.hpp"

namespace uplink::cli {

enum class Scenario { nonfading, fading };

std::string to_string(Scenario s);

/// Base parameter values with the transmit power kept in dB, the unit used
/// by the sweep axis and the configuration files.
struct BaseParams {
    double power_db;
    double alpha;
    double cap_low;
    double cap_delta;
    double p_low;

    /// Linear-power SystemParams with `swept` (one of p, alpha, C, dC, P_db)
    /// replaced by `value`. Throws std::invalid_argument for out-of-domain
    /// values, ConfigError for an unknown parameter name.
    SystemParams at(const std::string& swept, double value) const;

    static BaseParams from_config(const Config& cfg);
};

/// Full description of one batch experiment; everything that affects the
/// computed numbers lives here (and is hashed), job count does not.
struct SweepSpec {
    BaseParams base{};
    std::string swept;  ///< p | alpha | C | dC | P_db
    double from = 0.0;
    double to = 0.0;
    int steps = 0;  ///< >= 2
    Scenario scenario = Scenario::nonfading;
    std::vector<std::string> schemes;  ///< masks "1+2+5" or "1-layer"/"2-layer"
    std::vector<std::string> modes;    ///< separate/joint/upper or common/individual
    long mc_samples = 20000;
    std::uint64_t seed = 1;
    long budget = 0;  ///< 0 = scenario default
    bool full_rate_search = false;

    /// Swept axis values, inclusive endpoints.
    std::vector<double> values() const;
    long effective_budget() const;

    /// Validates schema (unknown keys are errors) and invariants.
    static SweepSpec from_config(const Config& cfg);

    /// Canonical key = value serialization; equal specs produce equal text.
    std::string canonical_text() const;
};

struct ResultRow {
    std::string swept_param;
    double value = 0.0;
    std::string scenario;
    std::string scheme;
    std::string mode;
    std::optional<double> throughput;  ///< empty: point skipped as degenerate
    std::optional<double> std_error;   ///< fading rows only
    std::vector<double> lambda;
    std::vector<double> rates;
    double ms = 0.0;
};

/// Evaluates every (value, scheme, mode) cell, up to `jobs` concurrently.
/// Row order and contents are independent of the job count (timings aside).
/// Degenerate-capacity points yield rows with no throughput. Cross-row bound
/// orderings are re-checked before returning; a violation throws
/// VerificationError.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, int jobs);

/// Single-point evaluation spec for the optimize and upper-bound commands.
struct PointSpec {
    BaseParams base{};
    Scenario scenario = Scenario::nonfading;
    std::string scheme;  ///< mask label or n-layer
    std::string mode;    ///< separate/joint or common/individual
    long mc_samples = 20000;
    std::uint64_t seed = 1;
    long budget = 0;
    bool full_rate_search = false;

    static PointSpec from_config(const Config& cfg);
};

/// Strict parse of a configuration holding only a [base] section.
BaseParams parse_base_only(const Config& cfg);

/// key = value report lines for one optimization run.
std::string run_optimize(const PointSpec& spec, int jobs);

/// key = value report lines for the genie bound at the base point.
std::string run_upper_bound(const BaseParams& base);

}  // namespace uplink::cli
