// Output writers: rows and thresholds as CSV, full results as JSON, a static SVG plot.

#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "hocm/scan.hpp"
#include "hocm/verify.hpp"

namespace hocm {

class EmitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.12g", with negative zero printed as 0.
std::string format_number(double x);

void write_rows_csv(std::ostream& out, const std::vector<ScanRow>& rows);
void write_thresholds_csv(std::ostream& out, const std::vector<Crossing>& crossings);
nlohmann::json result_to_json(const ScanResult& result);
nlohmann::json report_to_json(const VerifyReport& report);
/// nu(xi) per (vector, bipartition), primary series only, with a zero line.
void write_svg(std::ostream& out, const ScanResult& result);

enum class OutputFormat { Csv, Json, Svg };
OutputFormat parse_format(const std::string& name);

/// Writes <dir>/<scenario>.csv and <dir>/<scenario>_thresholds.csv, or .json, or .svg.
/// Returns the paths written.
std::vector<std::string> emit(const ScanResult& result, const std::string& dir, OutputFormat format);

}  // namespace hocm
