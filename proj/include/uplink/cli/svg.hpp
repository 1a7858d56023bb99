#pragma once

#include <string>
#include <vector>

#include "uplink/cli/sweep.hpp"

namespace uplink::cli {

/// Renders one polyline per (scheme, mode) pair over the swept axis, with
/// axes, tick labels, and a legend. Rows without a throughput are skipped.
/// Throws std::invalid_argument when no plottable row exists.
std::string render_svg(const std::vector<ResultRow>& rows);

}  // namespace uplink::cli
