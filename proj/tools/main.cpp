#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "uplink/cli/cache.hpp"
#include "uplink/cli/config.hpp"
#include "uplink/cli/csv.hpp"
#include "uplink/cli/svg.hpp"
#include "uplink/cli/sweep.hpp"
#include "uplink/cli/verify_runner.hpp"
#include "uplink/errors.hpp"
#include "uplink/version.hpp"

namespace {

using namespace uplink;
using namespace uplink::cli;

struct Flags {
    std::string config;
    std::string out;
    std::string svg;
    std::string level = "quick";
    std::string input_csv;
    std::uint64_t seed = 0;
    long samples = 0;
    long budget = 0;
    int jobs = 0;
    bool no_cache = false;
};

int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void deliver(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

int sweep_command(Scenario expected, const CLI::App* sub, const Flags& f) {
    const Config cfg = Config::parse_file(f.config);
    SweepSpec spec = SweepSpec::from_config(cfg);
    if (spec.scenario != expected) {
        throw ConfigError("config is a " + to_string(spec.scenario) +
                          " sweep; use the matching subcommand");
    }
    if (sub->count("--seed")) spec.seed = f.seed;
    if (sub->count("--samples")) spec.mc_samples = f.samples;
    if (sub->count("--budget")) spec.budget = f.budget;
    if (spec.mc_samples < 1) throw ConfigError("samples must be positive");
    if (spec.budget < 0) throw ConfigError("budget must be positive");

    const std::uint64_t hash = spec_hash(spec.canonical_text());
    std::optional<std::string> csv;
    if (!f.no_cache) {
        csv = cache_lookup(hash);
        if (csv) std::cerr << "cache hit, serving stored results\n";
    }
    if (!csv) {
        const int jobs = f.jobs > 0 ? f.jobs : default_jobs();
        csv = emit_csv(run_sweep(spec, jobs));
        if (!f.no_cache) cache_store(hash, *csv);
    }
    deliver(f.out, *csv);
    if (!f.svg.empty()) write_file(f.svg, render_svg(parse_csv(*csv)));
    return 0;
}

int optimize_command(const CLI::App* sub, const Flags& f) {
    const Config cfg = Config::parse_file(f.config);
    PointSpec spec = PointSpec::from_config(cfg);
    if (sub->count("--seed")) spec.seed = f.seed;
    if (sub->count("--samples")) spec.mc_samples = f.samples;
    if (sub->count("--budget")) spec.budget = f.budget;
    if (spec.mc_samples < 1) throw ConfigError("samples must be positive");
    if (spec.budget < 0) throw ConfigError("budget must be positive");
    const int jobs = f.jobs > 0 ? f.jobs : default_jobs();
    deliver(f.out, run_optimize(spec, jobs));
    return 0;
}

int upper_bound_command(const Flags& f) {
    const Config cfg = Config::parse_file(f.config);
    deliver(f.out, run_upper_bound(parse_base_only(cfg)));
    return 0;
}

int verify_command(const CLI::App* sub, const Flags& f) {
    const VerifyLevel level =
        f.level == "full" ? VerifyLevel::full : VerifyLevel::quick;
    const std::uint64_t seed = sub->count("--seed") ? f.seed : 1;
    const VerifyOutcome outcome = run_verify(level, seed);
    deliver(f.out, outcome.report_json);
    std::cerr << (outcome.pass ? "verification passed\n" : "verification FAILED\n");
    return outcome.pass ? 0 : 2;
}

int plot_command(const Flags& f) {
    write_file(f.svg, render_svg(parse_csv(read_file(f.input_csv))));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-cell uplink throughput evaluator (version " +
                 std::string(kToolVersion) + ")"};
    app.require_subcommand(1);

    Flags f;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "configuration file")
            ->required();
        sub->add_option("--out", f.out, "output path (default: stdout)");
        sub->add_option("--seed", f.seed, "override the random seed");
        sub->add_option("--samples", f.samples,
                        "override Monte Carlo samples per point");
        sub->add_option("--budget", f.budget,
                        "override the optimizer evaluation budget");
        sub->add_option("--jobs", f.jobs, "maximum concurrent evaluations");
        sub->add_flag("--no-cache", f.no_cache, "bypass the result cache");
    };

    CLI::App* nf = app.add_subcommand(
        "nf-sweep", "Sweep a parameter of the static-gain model");
    add_common(nf);
    nf->add_option("--svg", f.svg, "also render the sweep as an SVG plot");

    CLI::App* fad = app.add_subcommand(
        "fading-sweep", "Sweep a parameter of the Rayleigh-fading model");
    add_common(fad);
    fad->add_option("--svg", f.svg, "also render the sweep as an SVG plot");

    CLI::App* ub = app.add_subcommand(
        "upper-bound", "Genie-aided throughput bound at one parameter point");
    ub->add_option("--config", f.config, "configuration file")->required();
    ub->add_option("--out", f.out, "output path (default: stdout)");

    CLI::App* opt = app.add_subcommand(
        "optimize", "Optimize one scheme at one parameter point");
    add_common(opt);

    CLI::App* ver = app.add_subcommand(
        "verify", "Check closed forms against the joint-Gaussian oracle");
    ver->add_option("--level", f.level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    ver->add_option("--seed", f.seed, "seed for the randomized draws");
    ver->add_option("--out", f.out, "report path (default: stdout)");

    CLI::App* plot = app.add_subcommand("plot", "Render a sweep CSV as SVG");
    plot->add_option("csv", f.input_csv, "input CSV file")->required();
    plot->add_option("--svg", f.svg, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(nf)) return sweep_command(Scenario::nonfading, nf, f);
        if (app.got_subcommand(fad)) return sweep_command(Scenario::fading, fad, f);
        if (app.got_subcommand(ub)) return upper_bound_command(f);
        if (app.got_subcommand(opt)) return optimize_command(opt, f);
        if (app.got_subcommand(ver)) return verify_command(ver, f);
        if (app.got_subcommand(plot)) return plot_command(f);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const VerificationError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
