#include "uplink/cli/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uplink/errors.hpp"

namespace uplink::cli {

namespace {

constexpr const char* kHeader =
    "swept_param,value,scenario,scheme,mode,throughput,std_error,lambda,rates,ms";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw IoError("malformed " + what + " field '" + s + "'");
    }
    return v;
}

std::vector<double> split_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    if (s.empty()) return out;
    for (const auto& part : split(s, ';')) out.push_back(to_double(part, what));
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (const double x : v) {
        if (!out.empty()) out += ";";
        out += format_number(x);
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string emit_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << kHeader << "\n";
    for (const auto& r : rows) {
        out << r.swept_param << "," << format_number(r.value) << "," << r.scenario
            << "," << r.scheme << "," << r.mode << ","
            << (r.throughput ? format_number(*r.throughput) : "") << ","
            << (r.std_error ? format_number(*r.std_error) : "") << ","
            << join_doubles(r.lambda) << "," << join_doubles(r.rates) << ","
            << format_number(r.ms) << "\n";
    }
    return out.str();
}

std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw IoError("unexpected CSV header '" + line + "'");
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 10) {
            throw IoError("expected 10 CSV fields, got " +
                          std::to_string(cells.size()));
        }
        ResultRow r;
        r.swept_param = cells[0];
        r.value = to_double(cells[1], "value");
        r.scenario = cells[2];
        r.scheme = cells[3];
        r.mode = cells[4];
        if (!cells[5].empty()) r.throughput = to_double(cells[5], "throughput");
        if (!cells[6].empty()) r.std_error = to_double(cells[6], "std_error");
        r.lambda = split_doubles(cells[7], "lambda");
        r.rates = split_doubles(cells[8], "rates");
        r.ms = to_double(cells[9], "ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read from '" + path + "' failed");
    return buf.str();
}

}  // namespace uplink::cli
