#pragma once

#include <iosfwd>
#include <string>

#include "l2track/tracking.hpp"

namespace l2track {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Versioned CSV header comment shared by all CSV outputs.
inline constexpr const char* kCsvHeader = "# l2track v1";

/// Trace rows as CSV: columns t,estimate,truth,normalized_error.
void write_trace_csv(std::ostream& out, const TrackingReport& report);

/// One-line JSON summary: {mode, sup_error, argmax_t, trials, failures}.
std::string summary_json(TrackMode mode, double sup_error, u64 argmax_t, u64 trials,
                         u64 failures);

}  // namespace l2track
