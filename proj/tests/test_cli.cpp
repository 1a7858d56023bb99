#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uplink/cli/cache.hpp"
#include "uplink/cli/config.hpp"
#include "uplink/cli/csv.hpp"
#include "uplink/cli/svg.hpp"
#include "uplink/cli/sweep.hpp"
#include "uplink/cli/verify_runner.hpp"
#include "uplink/errors.hpp"

using namespace uplink;
using namespace uplink::cli;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir() {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("uplink_test_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool contains_line_tag(const std::exception& e, int line) {
    return std::string(e.what()).find("line " + std::to_string(line)) !=
           std::string::npos;
}

const char* kNfText = R"(# static-gain sweep
[sweep]
parameter = p
from = 0.0
to = 1.0
steps = 3
scenario = nonfading

[base]
power_db = 10.0
alpha = 0.3
cap_low = 1.0
cap_delta = 0.5
p_low = 0.1

[run]
schemes = 1, 1+2
modes = separate, joint, upper
)";

const char* kFadText = R"([sweep]
parameter = p
from = 0.2
to = 0.8
steps = 2
scenario = fading

[base]
power_db = 30.0
alpha = 0.3
cap_low = 4.0
cap_delta = 6.0
p_low = 0.2

[run]
schemes = 1-layer
modes = common
samples = 256
budget = 40
seed = 1
)";

std::vector<ResultRow> sample_rows() {
    std::vector<ResultRow> rows;
    ResultRow nf;
    nf.swept_param = "p";
    nf.value = 0.25;
    nf.scenario = "nonfading";
    nf.scheme = "1+2+5";
    nf.mode = "joint";
    nf.throughput = 1.2345678901234567;
    nf.lambda = {0.5, 0.25, 0.0, 0.0, 0.25};
    nf.rates = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    nf.ms = 12.5;
    rows.push_back(nf);

    ResultRow fad;
    fad.swept_param = "p";
    fad.value = 0.25;
    fad.scenario = "fading";
    fad.scheme = "2-layer";
    fad.mode = "individual";
    fad.throughput = 9.58926350713;
    fad.std_error = 0.018;
    fad.lambda = {0.93, 0.07};
    fad.rates = {2.83, 2.83, 3.63, 3.63};
    fad.ms = 2500.0;
    rows.push_back(fad);

    ResultRow upper;
    upper.swept_param = "p";
    upper.value = 0.25;
    upper.scenario = "nonfading";
    upper.scheme = "-";
    upper.mode = "upper";
    upper.throughput = 2.2009313392552423;
    upper.ms = 0.25;
    rows.push_back(upper);

    ResultRow skipped;
    skipped.swept_param = "C";
    skipped.value = 0.0;
    skipped.scenario = "fading";
    skipped.scheme = "1-layer";
    skipped.mode = "common";
    skipped.ms = 0.01;
    rows.push_back(skipped);
    return rows;
}

}  // namespace

TEST_CASE("configuration text parses into sectioned entries") {
    const Config cfg = Config::parse_text(
        "# comment\n[alpha]\nx = 1\ny = two words  \n\n[beta]\nx = 3\n");
    CHECK(cfg.entries().size() == 3);
    CHECK(cfg.has("alpha", "x"));
    CHECK(!cfg.has("alpha", "z"));
    CHECK(cfg.get_string("alpha", "y") == "two words");
    CHECK(cfg.get_double("beta", "x") == 3.0);
    CHECK(cfg.get("beta", "x").line == 7);
}

TEST_CASE("configuration syntax errors carry line numbers") {
    try {
        Config::parse_text("x = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(contains_line_tag(e, 1));
    }

    try {
        Config::parse_text("[s]\na = 1\na = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(contains_line_tag(e, 3));
    }

    CHECK_THROWS_AS(Config::parse_text("[s]\nno equals sign\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[s]\n= 1\n"), ConfigError);

    const Config cfg = Config::parse_text("[s]\nnum = abc\nflag = maybe\n");
    try {
        cfg.get_double("s", "num");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(contains_line_tag(e, 2));
    }
    CHECK_THROWS_AS(cfg.get_bool("s", "flag"), ConfigError);
    CHECK_THROWS_AS(cfg.get("s", "missing"), ConfigError);
}

TEST_CASE("missing configuration files are I/O errors") {
    CHECK_THROWS_AS(Config::parse_file("/nonexistent/uplink.cfg"), IoError);
}

TEST_CASE("base parameters substitute the swept value") {
    const Config cfg = Config::parse_text(
        "[base]\npower_db = 20.0\nalpha = 0.3\ncap_low = 1.0\ncap_delta = 0.5\n"
        "p_low = 0.1\n");
    const BaseParams base = BaseParams::from_config(cfg);

    const SystemParams unchanged = base.at("none", 0.0);
    CHECK(unchanged.power == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(unchanged.p_low == 0.1);

    CHECK(base.at("p", 0.5).p_low == 0.5);
    CHECK(base.at("alpha", 0.7).alpha == 0.7);
    CHECK(base.at("C", 2.0).cap_low == 2.0);
    CHECK(base.at("dC", 0.0).cap_delta == 0.0);
    CHECK(base.at("P_db", 0.0).power == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(base.at("p", 1.5), std::invalid_argument);
    CHECK_THROWS_AS(base.at("watts", 1.0), ConfigError);
}

TEST_CASE("sweep specifications validate their schema") {
    const SweepSpec spec = SweepSpec::from_config(Config::parse_text(kNfText));
    CHECK(spec.swept == "p");
    CHECK(spec.steps == 3);
    CHECK(spec.scenario == Scenario::nonfading);
    CHECK(spec.schemes == std::vector<std::string>{"1", "1+2"});
    CHECK(spec.modes == std::vector<std::string>{"separate", "joint", "upper"});
    const std::vector<double> v = spec.values();
    REQUIRE(v.size() == 3);
    CHECK(v.front() == 0.0);
    CHECK(v[1] == 0.5);
    CHECK(v.back() == 1.0);

    const auto reject = [](const std::string& text) {
        CHECK_THROWS_AS(SweepSpec::from_config(Config::parse_text(text)),
                        ConfigError);
    };
    // Unknown section and unknown key.
    reject(std::string(kNfText) + "[extra]\nx = 1\n");
    reject(std::string(kNfText) + "[run]\ncolor = red\n");

    std::string bad = kNfText;
    const auto swap = [&bad](const std::string& from, const std::string& to) {
        bad.replace(bad.find(from), from.size(), to);
    };
    swap("steps = 3", "steps = 1");
    reject(bad);

    bad = kNfText;
    swap("parameter = p", "parameter = bandwidth");
    reject(bad);

    bad = kNfText;
    swap("schemes = 1, 1+2", "schemes = 1, 1");
    reject(bad);

    bad = kNfText;
    swap("schemes = 1, 1+2", "schemes = 1-layer");
    reject(bad);

    bad = kNfText;
    swap("modes = separate, joint, upper", "modes = separate, common");
    reject(bad);

    bad = kNfText;
    swap("scenario = nonfading", "scenario = fading");
    reject(bad);  // nonfading schemes under a fading scenario

    // The exhaustive rate search only exists for the fading optimizer.
    reject(std::string(kNfText) + "[run]\nfull_rate_search = true\n");

    std::string fad_ok = std::string(kFadText) + "full_rate_search = true\n";
    CHECK(SweepSpec::from_config(Config::parse_text(fad_ok)).full_rate_search);
}

TEST_CASE("canonical sweep text is stable and seed-sensitive") {
    const SweepSpec a = SweepSpec::from_config(Config::parse_text(kNfText));
    // Reordered sections and extra comments do not change the canonical form.
    std::string shuffled = std::string("# banner\n[run]\nschemes = 1, 1+2\n") +
                           "modes = separate, joint, upper\n\n[base]\n" +
                           "power_db = 10.0\nalpha = 0.3\ncap_low = 1.0\n" +
                           "cap_delta = 0.5\np_low = 0.1\n\n[sweep]\n" +
                           "parameter = p\nfrom = 0.0\nto = 1.0\nsteps = 3\n" +
                           "scenario = nonfading\n";
    const SweepSpec b = SweepSpec::from_config(Config::parse_text(shuffled));
    CHECK(a.canonical_text() == b.canonical_text());

    SweepSpec c = a;
    c.seed = 2;
    CHECK(a.canonical_text() != c.canonical_text());
    SweepSpec d = a;
    d.budget = 12345;
    CHECK(a.canonical_text() != d.canonical_text());
}

TEST_CASE("numbers round to twelve significant digits") {
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(69.4) == "69.4");
    CHECK(format_number(8.2715820312498316) == "8.27158203125");
    CHECK(format_number(-1.5e-9) == "-1.5e-09");
}

TEST_CASE("result rows survive the CSV round trip") {
    const std::vector<ResultRow> rows = sample_rows();
    const std::string csv = emit_csv(rows);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "swept_param,value,scenario,scheme,mode,throughput,std_error,lambda,"
          "rates,ms");

    const std::vector<ResultRow> back = parse_csv(csv);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].swept_param == rows[i].swept_param);
        CHECK(back[i].value == rows[i].value);
        CHECK(back[i].scenario == rows[i].scenario);
        CHECK(back[i].scheme == rows[i].scheme);
        CHECK(back[i].mode == rows[i].mode);
        CHECK(back[i].throughput.has_value() == rows[i].throughput.has_value());
        CHECK(back[i].std_error.has_value() == rows[i].std_error.has_value());
        CHECK(back[i].lambda.size() == rows[i].lambda.size());
        CHECK(back[i].rates.size() == rows[i].rates.size());
    }
    // A second pass is byte-stable.
    CHECK(emit_csv(back) == csv);

    CHECK_THROWS_AS(parse_csv("wrong,header\n1,2\n"), IoError);
    CHECK_THROWS_AS(parse_csv(emit_csv(rows) + "p,0.1,nonfading\n"), IoError);
    std::string junk = emit_csv(rows);
    junk.replace(junk.find("0.25"), 4, "zero");
    CHECK_THROWS_AS(parse_csv(junk), IoError);
}

TEST_CASE("cache stores and validates payloads") {
    const fs::path dir = make_temp_dir();
    ::setenv("UPLINK_CACHE_DIR", dir.c_str(), 1);
    CHECK(cache_dir() == dir.string());

    const std::uint64_t h1 = spec_hash("spec one");
    const std::uint64_t h2 = spec_hash("spec two");
    CHECK(h1 != h2);

    CHECK(!cache_lookup(h1).has_value());
    const std::string payload = "swept_param,value\na,1\n";
    cache_store(h1, payload);
    const auto hit = cache_lookup(h1);
    REQUIRE(hit.has_value());
    CHECK(*hit == payload);
    CHECK(!cache_lookup(h2).has_value());

    // Corrupting the stored bytes turns the entry into a miss.
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::ofstream out(entry.path(), std::ios::binary | std::ios::trunc);
        out << "garbage";
    }
    CHECK(!cache_lookup(h1).has_value());
    cache_store(h1, payload);
    CHECK(cache_lookup(h1).has_value());
    ::unsetenv("UPLINK_CACHE_DIR");
}

TEST_CASE("svg rendering draws one series per scheme and mode") {
    const std::vector<ResultRow> rows = sample_rows();
    const std::string svg = render_svg(rows);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("1+2+5 / joint") != std::string::npos);
    CHECK(svg.find("- / upper") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    std::vector<ResultRow> empty_rows(1);
    empty_rows[0].swept_param = "p";
    CHECK_THROWS_AS(render_svg(empty_rows), std::invalid_argument);
}

TEST_CASE("sweeps are reproducible across job counts") {
    const SweepSpec spec = SweepSpec::from_config(Config::parse_text(kNfText));
    const std::vector<ResultRow> serial = run_sweep(spec, 1);
    const std::vector<ResultRow> parallel = run_sweep(spec, 4);
    REQUIRE(serial.size() == parallel.size());
    // 3 values x (2 schemes x 2 modes + the bound row).
    CHECK(serial.size() == 15);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].value == parallel[i].value);
        CHECK(serial[i].scheme == parallel[i].scheme);
        CHECK(serial[i].mode == parallel[i].mode);
        CHECK(serial[i].throughput == parallel[i].throughput);
        CHECK(serial[i].lambda == parallel[i].lambda);
        CHECK(serial[i].rates == parallel[i].rates);
    }

    // The bound row follows the achievable rows of its swept value.
    CHECK(serial[4].mode == "upper");
    CHECK(serial[4].scheme == "-");
    CHECK(!serial[0].std_error.has_value());
}

TEST_CASE("fading sweeps carry standard errors") {
    const SweepSpec spec = SweepSpec::from_config(Config::parse_text(kFadText));
    const std::vector<ResultRow> rows = run_sweep(spec, 2);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.scenario == "fading");
        REQUIRE(row.throughput.has_value());
        REQUIRE(row.std_error.has_value());
        CHECK(*row.std_error > 0.0);
        CHECK(row.lambda.size() == 2);
        CHECK(row.rates.size() == 4);
    }
}

TEST_CASE("degenerate sweep points produce empty rows") {
    std::string text = kFadText;
    text.replace(text.find("parameter = p"), 13, "parameter = C");
    text.replace(text.find("from = 0.2"), 10, "from = 0.0");
    text.replace(text.find("to = 0.8"), 8, "to = 4.0");
    const SweepSpec spec = SweepSpec::from_config(Config::parse_text(text));
    const std::vector<ResultRow> rows = run_sweep(spec, 1);
    REQUIRE(rows.size() == 2);
    CHECK(!rows[0].throughput.has_value());
    CHECK(rows[1].throughput.has_value());
}

TEST_CASE("single-point reports carry the expected keys") {
    const Config cfg = Config::parse_text(
        "[base]\npower_db = 10.0\nalpha = 0.3\ncap_low = 1.0\ncap_delta = 0.5\n"
        "p_low = 0.1\n\n[run]\nscenario = nonfading\nscheme = 1+2\n"
        "mode = joint\n");
    const PointSpec spec = PointSpec::from_config(cfg);
    const std::string report = run_optimize(spec, 1);
    CHECK(report.find("average=") != std::string::npos);
    CHECK(report.find("lambda=") != std::string::npos);
    CHECK(report.find("state_low_low=") != std::string::npos);

    const std::string bound = run_upper_bound(spec.base);
    CHECK(bound.find("average=") != std::string::npos);
    CHECK(bound.find("noise_low=") != std::string::npos);

    const Config fad = Config::parse_text(
        "[base]\npower_db = 30.0\nalpha = 0.3\ncap_low = 4.0\ncap_delta = 6.0\n"
        "p_low = 0.2\n\n[run]\nscenario = fading\nscheme = 1-layer\n"
        "mode = common\nsamples = 256\nbudget = 40\n");
    const std::string mc = run_optimize(PointSpec::from_config(fad), 1);
    CHECK(mc.find("estimate=") != std::string::npos);
    CHECK(mc.find("std_error=") != std::string::npos);
    CHECK(mc.find("evaluations=") != std::string::npos);
}

TEST_CASE("quick oracle verification passes and reports sections") {
    const VerifyOutcome out = run_verify(VerifyLevel::quick, 1);
    CHECK(out.pass);
    CHECK(out.report_json.find("\"pass\": true") != std::string::npos);
    CHECK(out.report_json.find("layer_bounds") != std::string::npos);
    CHECK(out.report_json.find("description_rates") != std::string::npos);
    CHECK(out.report_json.find("fading_regions") != std::string::npos);
    CHECK(out.report_json.find("sampler") != std::string::npos);
    CHECK(out.report_json.find("fifth_layer_conditioning_variants") !=
          std::string::npos);
}

TEST_CASE("command-line binary round trip") {
    const char* bin = std::getenv("UPLINK_BIN_PATH");
    REQUIRE(bin != nullptr);
    const fs::path dir = make_temp_dir();
    const fs::path cache = dir / "cache";
    const std::string env = "UPLINK_CACHE_DIR=" + cache.string() + " ";

    const fs::path cfg = dir / "nf.cfg";
    std::ofstream(cfg) << kNfText;
    const fs::path out_csv = dir / "out.csv";
    const fs::path err_log = dir / "err.log";

    const auto run = [&](const std::string& args) {
        const std::string cmd =
            env + std::string(bin) + " " + args + " 2>" + err_log.string();
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };

    CHECK(run("--help >/dev/null") == 0);
    CHECK(run("nf-sweep >/dev/null") == 1);  // missing --config

    CHECK(run("nf-sweep --config " + cfg.string() + " --out " +
              out_csv.string()) == 0);
    const std::string first = slurp(out_csv);
    CHECK(first.rfind("swept_param,value,", 0) == 0);

    // A second run is served from the cache, byte for byte.
    CHECK(run("nf-sweep --config " + cfg.string() + " --out " +
              out_csv.string()) == 0);
    CHECK(slurp(err_log).find("cache") != std::string::npos);
    CHECK(slurp(out_csv) == first);

    // Bypassing the cache recomputes everything but the timing column.
    CHECK(run("nf-sweep --no-cache --config " + cfg.string() + " --out " +
              out_csv.string()) == 0);
    const auto strip_ms = [](const std::string& text) {
        std::string kept;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            const std::string line = text.substr(pos, eol - pos);
            kept += line.substr(0, line.rfind(','));
            kept += '\n';
            pos = eol + 1;
        }
        return kept;
    };
    CHECK(strip_ms(slurp(out_csv)) == strip_ms(first));

    // Scenario and subcommand must agree.
    CHECK(run("fading-sweep --config " + cfg.string()) == 1);

    // Configuration mistakes exit 1; unreadable files exit 3.
    const fs::path bad = dir / "bad.cfg";
    std::ofstream(bad) << std::string(kNfText) + "[run]\ncolor = red\n";
    CHECK(run("nf-sweep --config " + bad.string()) == 1);
    CHECK(run("nf-sweep --config " + (dir / "absent.cfg").string()) == 3);

    const fs::path svg = dir / "plot.svg";
    CHECK(run("plot " + out_csv.string() + " --svg " + svg.string()) == 0);
    CHECK(slurp(svg).find("<svg") != std::string::npos);
    CHECK(run("plot " + (dir / "absent.csv").string() + " --svg " +
              svg.string()) == 3);

    const fs::path report = dir / "verify.json";
    CHECK(run("verify --level quick --out " + report.string()) == 0);
    CHECK(slurp(report).find("\"pass\": true") != std::string::npos);
    CHECK(slurp(err_log).find("verification passed") != std::string::npos);
}
