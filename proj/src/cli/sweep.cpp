#include "uplink/cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include "uplink/errors.hpp"
#include "uplink/fading.hpp"
#include "uplink/nonfading.hpp"

namespace uplink::cli {

namespace {

constexpr long kDefaultNonfadingBudget = 20000;
constexpr long kDefaultFadingBudget = 500;

const std::set<std::string> kSweptNames = {"p", "alpha", "C", "dC", "P_db"};

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ",";
        out += s;
    }
    return out;
}

void check_schema(const Config& cfg,
                  const std::vector<std::pair<std::string, std::set<std::string>>>&
                      schema) {
    for (const auto& e : cfg.entries()) {
        const auto it =
            std::find_if(schema.begin(), schema.end(),
                         [&](const auto& s) { return s.first == e.section; });
        if (it == schema.end()) {
            throw ConfigError("unknown section [" + e.section + "]", e.line);
        }
        if (!it->second.count(e.key)) {
            throw ConfigError("unknown key '" + e.key + "' in [" + e.section + "]",
                              e.line);
        }
    }
}

void check_required(const Config& cfg, const std::string& section,
                    const std::set<std::string>& keys) {
    for (const auto& key : keys) {
        if (!cfg.has(section, key)) {
            throw ConfigError("missing key '" + key + "' in [" + section + "]");
        }
    }
}

void check_domain(const std::string& swept, double v, const ConfigEntry& e) {
    const bool ok = swept == "p" || swept == "alpha"
                        ? v >= 0.0 && v <= 1.0
                        : swept == "P_db" || v >= 0.0;
    if (!ok || !std::isfinite(v)) {
        throw ConfigError("value " + e.value + " outside the domain of '" + swept +
                              "'",
                          e.line);
    }
}

DecompressionMode decompression(const std::string& mode) {
    return mode == "joint" ? DecompressionMode::joint : DecompressionMode::separate;
}

OutageMode outage(const std::string& mode) {
    return mode == "individual" ? OutageMode::individual : OutageMode::common;
}

int layer_count(const std::string& scheme) { return scheme == "2-layer" ? 2 : 1; }

std::vector<double> lambda_of(const SimplexPoint& p) {
    std::vector<double> out(static_cast<std::size_t>(p.size()));
    for (int i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i];
    return out;
}

std::vector<double> rates_of(const RateAssignment& r) {
    std::vector<double> out;
    out.reserve(10);
    for (int user = 1; user <= 2; ++user) {
        for (int layer = 1; layer <= 5; ++layer) {
            out.push_back(r.rate(user, layer));
        }
    }
    return out;
}

}  // namespace

std::string to_string(Scenario s) {
    return s == Scenario::nonfading ? "nonfading" : "fading";
}

SystemParams BaseParams::at(const std::string& swept, double value) const {
    double db = power_db, a = alpha, c = cap_low, dc = cap_delta, p = p_low;
    if (swept == "p") {
        p = value;
    } else if (swept == "alpha") {
        a = value;
    } else if (swept == "C") {
        c = value;
    } else if (swept == "dC") {
        dc = value;
    } else if (swept == "P_db") {
        db = value;
    } else if (!swept.empty() && swept != "none") {
        throw ConfigError("unknown swept parameter '" + swept + "'");
    }
    return SystemParams(std::pow(10.0, db / 10.0), a, c, dc, p);
}

BaseParams BaseParams::from_config(const Config& cfg) {
    check_required(cfg, "base",
                   {"power_db", "alpha", "cap_low", "cap_delta", "p_low"});
    BaseParams b;
    b.power_db = cfg.get_double("base", "power_db");
    b.alpha = cfg.get_double("base", "alpha");
    b.cap_low = cfg.get_double("base", "cap_low");
    b.cap_delta = cfg.get_double("base", "cap_delta");
    b.p_low = cfg.get_double("base", "p_low");
    return b;
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] =
            from + (to - from) * i / static_cast<double>(steps - 1);
    }
    return out;
}

long SweepSpec::effective_budget() const {
    if (budget > 0) return budget;
    return scenario == Scenario::nonfading ? kDefaultNonfadingBudget
                                           : kDefaultFadingBudget;
}

SweepSpec SweepSpec::from_config(const Config& cfg) {
    check_schema(cfg, {{"sweep", {"parameter", "from", "to", "steps", "scenario"}},
                       {"base", {"power_db", "alpha", "cap_low", "cap_delta", "p_low"}},
                       {"run",
                        {"schemes", "modes", "budget", "seed", "samples",
                         "full_rate_search"}}});
    check_required(cfg, "sweep", {"parameter", "from", "to", "steps", "scenario"});
    check_required(cfg, "run", {"schemes", "modes"});

    SweepSpec s;
    s.base = BaseParams::from_config(cfg);
    s.swept = cfg.get_string("sweep", "parameter");
    if (!kSweptNames.count(s.swept)) {
        throw ConfigError("unknown swept parameter '" + s.swept + "'",
                          cfg.get("sweep", "parameter").line);
    }
    s.from = cfg.get_double("sweep", "from");
    s.to = cfg.get_double("sweep", "to");
    const long steps = cfg.get_long("sweep", "steps");
    if (steps < 2) {
        throw ConfigError("steps must be at least 2", cfg.get("sweep", "steps").line);
    }
    s.steps = static_cast<int>(steps);
    check_domain(s.swept, s.from, cfg.get("sweep", "from"));
    check_domain(s.swept, s.to, cfg.get("sweep", "to"));

    const std::string scenario = cfg.get_string("sweep", "scenario");
    if (scenario == "nonfading") {
        s.scenario = Scenario::nonfading;
    } else if (scenario == "fading") {
        s.scenario = Scenario::fading;
    } else {
        throw ConfigError("scenario must be nonfading or fading",
                          cfg.get("sweep", "scenario").line);
    }

    s.schemes = cfg.get_list("run", "schemes");
    s.modes = cfg.get_list("run", "modes");
    const ConfigEntry& schemes_entry = cfg.get("run", "schemes");
    const ConfigEntry& modes_entry = cfg.get("run", "modes");
    for (const auto& scheme : s.schemes) {
        if (std::count(s.schemes.begin(), s.schemes.end(), scheme) > 1) {
            throw ConfigError("duplicate scheme '" + scheme + "'", schemes_entry.line);
        }
        if (s.scenario == Scenario::nonfading) {
            try {
                SchemeMask::parse(scheme);
            } catch (const std::invalid_argument& err) {
                throw ConfigError(err.what(), schemes_entry.line);
            }
        } else if (scheme != "1-layer" && scheme != "2-layer") {
            throw ConfigError("fading schemes are 1-layer and 2-layer, got '" +
                                  scheme + "'",
                              schemes_entry.line);
        }
    }
    const std::set<std::string> allowed_modes =
        s.scenario == Scenario::nonfading
            ? std::set<std::string>{"separate", "joint", "upper"}
            : std::set<std::string>{"common", "individual"};
    for (const auto& mode : s.modes) {
        if (!allowed_modes.count(mode)) {
            throw ConfigError("invalid mode '" + mode + "' for " + scenario +
                                  " sweeps",
                              modes_entry.line);
        }
        if (std::count(s.modes.begin(), s.modes.end(), mode) > 1) {
            throw ConfigError("duplicate mode '" + mode + "'", modes_entry.line);
        }
    }

    if (cfg.has("run", "samples")) {
        s.mc_samples = cfg.get_long("run", "samples");
        if (s.mc_samples < 1) {
            throw ConfigError("samples must be positive", cfg.get("run", "samples").line);
        }
    }
    if (cfg.has("run", "seed")) s.seed = cfg.get_u64("run", "seed");
    if (cfg.has("run", "budget")) {
        s.budget = cfg.get_long("run", "budget");
        if (s.budget < 1) {
            throw ConfigError("budget must be positive", cfg.get("run", "budget").line);
        }
    }
    if (cfg.has("run", "full_rate_search")) {
        if (s.scenario != Scenario::fading) {
            throw ConfigError("full_rate_search applies to fading sweeps only",
                              cfg.get("run", "full_rate_search").line);
        }
        s.full_rate_search = cfg.get_bool("run", "full_rate_search");
    }
    return s;
}

std::string SweepSpec::canonical_text() const {
    std::ostringstream out;
    out << "scenario=" << to_string(scenario) << "\n"
        << "swept=" << swept << "\n"
        << "from=" << exact(from) << "\n"
        << "to=" << exact(to) << "\n"
        << "steps=" << steps << "\n"
        << "power_db=" << exact(base.power_db) << "\n"
        << "alpha=" << exact(base.alpha) << "\n"
        << "cap_low=" << exact(base.cap_low) << "\n"
        << "cap_delta=" << exact(base.cap_delta) << "\n"
        << "p_low=" << exact(base.p_low) << "\n"
        << "schemes=" << join(schemes) << "\n"
        << "modes=" << join(modes) << "\n"
        << "samples=" << mc_samples << "\n"
        << "seed=" << seed << "\n"
        << "budget=" << effective_budget() << "\n"
        << "full_rate_search=" << (full_rate_search ? 1 : 0) << "\n";
    return out.str();
}

namespace {

struct Cell {
    double value;
    std::string scheme;
    std::string mode;
};

std::vector<Cell> layout_cells(const SweepSpec& spec) {
    std::vector<Cell> cells;
    const bool upper = std::count(spec.modes.begin(), spec.modes.end(), "upper") > 0;
    for (const double v : spec.values()) {
        for (const auto& scheme : spec.schemes) {
            for (const auto& mode : spec.modes) {
                if (mode == "upper") continue;
                cells.push_back({v, scheme, mode});
            }
        }
        if (upper) cells.push_back({v, "-", "upper"});
    }
    return cells;
}

ResultRow compute_cell(const SweepSpec& spec, const Cell& cell) {
    ResultRow row;
    row.swept_param = spec.swept;
    row.value = cell.value;
    row.scenario = to_string(spec.scenario);
    row.scheme = cell.scheme;
    row.mode = cell.mode;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const SystemParams params = spec.base.at(spec.swept, cell.value);
        if (spec.scenario == Scenario::nonfading) {
            if (cell.mode == "upper") {
                row.throughput = upper_bound_report(params).average;
            } else {
                const ThroughputReport rep =
                    optimize_scheme(params, decompression(cell.mode),
                                    SchemeMask::parse(cell.scheme),
                                    spec.effective_budget());
                row.throughput = rep.average;
                row.lambda = lambda_of(rep.lambda);
                row.rates = rates_of(rep.rates);
            }
        } else {
            const FadingOptimum opt = optimize_fading(
                params, outage(cell.mode), layer_count(cell.scheme),
                spec.mc_samples, spec.seed, spec.effective_budget(),
                !spec.full_rate_search, 1);
            row.throughput = opt.estimate;
            row.std_error = opt.std_error;
            row.lambda = {1.0 - opt.lambda2, opt.lambda2};
            row.rates = {opt.rates.r11, opt.rates.r21, opt.rates.r12,
                         opt.rates.r22};
        }
    } catch (const DegenerateCapacityError&) {
        // Skipped point: the row records the swept value with no throughput.
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return row;
}

bool mask_subset(const std::string& inner, const std::string& outer) {
    const auto a = SchemeMask::parse(inner).layers();
    const auto b = SchemeMask::parse(outer).layers();
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

[[noreturn]] void guard_failure(const ResultRow& lo, const ResultRow& hi) {
    std::ostringstream msg;
    msg << "bound ordering violated at " << lo.swept_param << "=" << lo.value
        << ": " << hi.scheme << "/" << hi.mode << " = " << *hi.throughput
        << " below " << lo.scheme << "/" << lo.mode << " = " << *lo.throughput;
    throw VerificationError(msg.str());
}

/// Final cross-row assertions before any bytes leave the process: the genie
/// bound dominates every achievable value, larger schemes dominate nested
/// ones, joint decompression dominates separate, individual outage dominates
/// common, and two layers dominate one.
void emission_guard(const SweepSpec& spec, const std::vector<ResultRow>& rows,
                    std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        const ResultRow& a = rows[i];
        if (!a.throughput) continue;
        for (std::size_t k = begin; k < end; ++k) {
            const ResultRow& b = rows[k];
            if (i == k || !b.throughput) continue;
            if (spec.scenario == Scenario::nonfading) {
                if (b.mode == "upper" && a.mode != "upper" &&
                    *b.throughput < *a.throughput - 1e-9) {
                    guard_failure(a, b);
                }
                if (a.mode == b.mode && a.scheme != b.scheme &&
                    a.mode != "upper" && mask_subset(a.scheme, b.scheme) &&
                    *b.throughput < *a.throughput - 1e-3) {
                    guard_failure(a, b);
                }
                if (a.scheme == b.scheme && a.mode == "separate" &&
                    b.mode == "joint" && *b.throughput < *a.throughput - 1e-3) {
                    guard_failure(a, b);
                }
            } else {
                const double slack =
                    2.0 * std::hypot(a.std_error.value_or(0.0),
                                     b.std_error.value_or(0.0));
                const bool layers_nested =
                    a.mode == b.mode && a.scheme == "1-layer" && b.scheme == "2-layer";
                const bool outage_nested = a.scheme == b.scheme &&
                                           a.mode == "common" &&
                                           b.mode == "individual";
                if ((layers_nested || outage_nested) &&
                    *b.throughput < *a.throughput - slack) {
                    guard_failure(a, b);
                }
            }
        }
    }
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, int jobs) {
    if (jobs < 1) throw std::invalid_argument("job count must be positive");
    const std::vector<Cell> cells = layout_cells(spec);
    std::vector<ResultRow> rows(cells.size());

    if (jobs == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            rows[i] = compute_cell(spec, cells[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < cells.size();
                 i = next.fetch_add(1)) {
                rows[i] = compute_cell(spec, cells[i]);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t threads =
            std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    const std::size_t per_point = cells.size() / spec.values().size();
    for (std::size_t begin = 0; begin < rows.size(); begin += per_point) {
        emission_guard(spec, rows, begin, begin + per_point);
    }
    return rows;
}

PointSpec PointSpec::from_config(const Config& cfg) {
    check_schema(cfg, {{"base", {"power_db", "alpha", "cap_low", "cap_delta", "p_low"}},
                       {"run",
                        {"scenario", "scheme", "mode", "budget", "seed", "samples",
                         "full_rate_search"}}});
    check_required(cfg, "run", {"scenario", "scheme", "mode"});

    PointSpec s;
    s.base = BaseParams::from_config(cfg);
    const std::string scenario = cfg.get_string("run", "scenario");
    if (scenario == "nonfading") {
        s.scenario = Scenario::nonfading;
    } else if (scenario == "fading") {
        s.scenario = Scenario::fading;
    } else {
        throw ConfigError("scenario must be nonfading or fading",
                          cfg.get("run", "scenario").line);
    }
    s.scheme = cfg.get_string("run", "scheme");
    s.mode = cfg.get_string("run", "mode");
    if (s.scenario == Scenario::nonfading) {
        try {
            SchemeMask::parse(s.scheme);
        } catch (const std::invalid_argument& err) {
            throw ConfigError(err.what(), cfg.get("run", "scheme").line);
        }
        if (s.mode != "separate" && s.mode != "joint") {
            throw ConfigError("mode must be separate or joint",
                              cfg.get("run", "mode").line);
        }
    } else {
        if (s.scheme != "1-layer" && s.scheme != "2-layer") {
            throw ConfigError("scheme must be 1-layer or 2-layer",
                              cfg.get("run", "scheme").line);
        }
        if (s.mode != "common" && s.mode != "individual") {
            throw ConfigError("mode must be common or individual",
                              cfg.get("run", "mode").line);
        }
    }
    if (cfg.has("run", "samples")) s.mc_samples = cfg.get_long("run", "samples");
    if (cfg.has("run", "seed")) s.seed = cfg.get_u64("run", "seed");
    if (cfg.has("run", "budget")) s.budget = cfg.get_long("run", "budget");
    if (cfg.has("run", "full_rate_search")) {
        s.full_rate_search = cfg.get_bool("run", "full_rate_search");
    }
    if (s.mc_samples < 1) throw ConfigError("samples must be positive");
    if (s.budget < 0) throw ConfigError("budget must be positive");
    return s;
}

namespace {

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string joined(const std::vector<double>& v) {
    std::string out;
    for (const double x : v) {
        if (!out.empty()) out += ";";
        out += g12(x);
    }
    return out;
}

}  // namespace

BaseParams parse_base_only(const Config& cfg) {
    check_schema(cfg,
                 {{"base", {"power_db", "alpha", "cap_low", "cap_delta", "p_low"}}});
    return BaseParams::from_config(cfg);
}

std::string run_optimize(const PointSpec& spec, int jobs) {
    const SystemParams params = spec.base.at("none", 0.0);
    std::ostringstream out;
    out << "scenario=" << to_string(spec.scenario) << "\n"
        << "scheme=" << spec.scheme << "\n"
        << "mode=" << spec.mode << "\n";
    const long budget = spec.budget > 0
                            ? spec.budget
                            : (spec.scenario == Scenario::nonfading
                                   ? kDefaultNonfadingBudget
                                   : kDefaultFadingBudget);
    if (spec.scenario == Scenario::nonfading) {
        const ThroughputReport rep = optimize_scheme(
            params, decompression(spec.mode), SchemeMask::parse(spec.scheme), budget);
        out << "average=" << g12(rep.average) << "\n"
            << "state_low_low=" << g12(rep.t1) << "\n"
            << "state_high_low=" << g12(rep.t2) << "\n"
            << "state_low_high=" << g12(rep.t3) << "\n"
            << "state_high_high=" << g12(rep.t4) << "\n"
            << "lambda=" << joined(lambda_of(rep.lambda)) << "\n"
            << "rates=" << joined(rates_of(rep.rates)) << "\n";
    } else {
        const FadingOptimum opt = optimize_fading(
            params, outage(spec.mode), layer_count(spec.scheme), spec.mc_samples,
            spec.seed, budget, !spec.full_rate_search, jobs);
        out << "estimate=" << g12(opt.estimate) << "\n"
            << "std_error=" << g12(opt.std_error) << "\n"
            << "samples=" << spec.mc_samples << "\n"
            << "evaluations=" << opt.evaluations << "\n"
            << "lambda=" << g12(1.0 - opt.lambda2) << ";" << g12(opt.lambda2) << "\n"
            << "rates=" << joined({opt.rates.r11, opt.rates.r21, opt.rates.r12,
                                   opt.rates.r22})
            << "\n";
    }
    return out.str();
}

std::string run_upper_bound(const BaseParams& base) {
    const SystemParams params = base.at("none", 0.0);
    const UpperBoundReport rep = upper_bound_report(params);
    std::ostringstream out;
    out << "average=" << g12(rep.average) << "\n"
        << "state_low_low=" << g12(rep.t1) << "\n"
        << "state_mixed=" << g12(rep.t2) << "\n"
        << "state_high_high=" << g12(rep.t3) << "\n"
        << "noise_low=" << g12(rep.sigma1_sq) << "\n"
        << "noise_high=" << g12(rep.sigma4_sq) << "\n"
        << "noise_mixed_refined=" << g12(rep.sigma2_sq) << "\n"
        << "noise_mixed_coarse=" << g12(rep.sigma3_sq) << "\n";
    return out.str();
}

}  // namespace uplink::cli
