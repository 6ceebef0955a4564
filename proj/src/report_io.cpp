#include "l2track/report_io.hpp"

#include <charconv>
#include <ostream>

#include <json.hpp>

namespace l2track {

std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& out, const TrackingReport& report) {
  out << "t,estimate,truth,normalized_error\n";
  for (const TracePoint& p : report.trace)
    out << p.t << ',' << format_double(p.estimate) << ',' << format_double(p.truth) << ','
        << format_double(p.normalized_error) << '\n';
}

std::string summary_json(TrackMode mode, double sup_error, u64 argmax_t, u64 trials,
                         u64 failures) {
  nlohmann::ordered_json j;
  j["mode"] = mode == TrackMode::kWeak ? "weak" : "strong";
  j["sup_error"] = sup_error;
  j["argmax_t"] = argmax_t;
  j["trials"] = trials;
  j["failures"] = failures;
  return j.dump();
}

}  // namespace l2track
