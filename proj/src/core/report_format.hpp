#pragma once

// CSV and JSON rendering of performance reports, comparisons and roofline
// points. Numbers are printed in plain decimal with at least 9 significant
// digits so the output is byte-stable and easy to diff.

#include <string>
#include <vector>

#include "core/perf_model.hpp"

namespace dslr::report {

enum class Format { Csv, Json };

// Throws Error(InvalidArgument) for anything but "csv" / "json".
Format parse_format(const std::string& s);

// Plain decimal, no exponent. Integral doubles keep their fractional digits.
std::string decimal(double v);

std::string render_report(const perf::PerfReport& rep, Format fmt);
// One row per network; each report must carry a baseline.
std::string render_compare(const std::vector<perf::PerfReport>& reps, Format fmt);
// (oi, gops) point per layer for every design in the report.
std::string render_roofline(const perf::PerfReport& rep, Format fmt);

}  // namespace dslr::report
