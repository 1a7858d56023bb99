#pragma once

#include <string>
#include <vector>

#include "uplink/cli/sweep.hpp"

namespace uplink::cli {

/// 12 significant digits, the repository-wide exchange precision.
std::string format_number(double v);

/// Serializes rows under the fixed header
/// swept_param,value,scenario,scheme,mode,throughput,std_error,lambda,rates,ms
/// with lambda and rates semicolon-joined and optional cells left empty.
std::string emit_csv(const std::vector<ResultRow>& rows);

/// Inverse of emit_csv: parse_csv(emit_csv(rows)) reproduces the rows.
/// Throws IoError on a malformed header or row.
std::vector<ResultRow> parse_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace uplink::cli
