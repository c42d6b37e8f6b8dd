#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuckoo/experiment.hpp"

namespace cuckoo {

inline constexpr int kReportFormatVersion = 1;
inline constexpr const char* kCsvHeader =
    "n,m,epsilon,d,s,mode,trials,failures,p_hat,ci_low,ci_high,master_seed";

namespace detail {
inline std::string short_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace detail

inline void write_csv_row(std::ostream& out, const PointResult& r) {
  out << r.params.n << ',' << r.params.m << ','
      << detail::short_double(r.params.epsilon) << ',' << r.params.d << ','
      << r.params.s << ',' << mode_name(r.mode) << ',' << r.trials << ','
      << r.failures << ',' << detail::short_double(r.p_hat) << ','
      << detail::short_double(r.ci_low) << ',' << detail::short_double(r.ci_high)
      << ',' << r.master_seed << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<PointResult>& rows) {
  out << kCsvHeader << '\n';
  for (const PointResult& r : rows) write_csv_row(out, r);
}

inline nlohmann::json point_to_json(const PointResult& r) {
  return nlohmann::json{{"n", r.params.n},
                        {"m", r.params.m},
                        {"epsilon", r.params.epsilon},
                        {"d", r.params.d},
                        {"s", r.params.s},
                        {"mode", mode_name(r.mode)},
                        {"trials", r.trials},
                        {"failures", r.failures},
                        {"p_hat", r.p_hat},
                        {"ci_low", r.ci_low},
                        {"ci_high", r.ci_high},
                        {"master_seed", r.master_seed}};
}

/// JSON mirrors the CSV rows; a fit block is attached when a sweep produced
/// one (null otherwise).
inline void write_json(std::ostream& out, const std::vector<PointResult>& rows,
                       const ExponentFit* fit = nullptr) {
  nlohmann::json doc;
  doc["format_version"] = kReportFormatVersion;
  doc["points"] = nlohmann::json::array();
  for (const PointResult& r : rows) doc["points"].push_back(point_to_json(r));
  if (fit) {
    doc["fit"] = {{"slope", fit->slope},
                  {"intercept", fit->intercept},
                  {"slope_stderr", fit->slope_stderr},
                  {"points_used", fit->points.size()}};
  } else {
    doc["fit"] = nullptr;
  }
  out << doc.dump(2) << '\n';
}

}  // namespace cuckoo
