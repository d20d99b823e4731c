#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "greenlab/grid.hpp"

namespace greenlab {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kArtifactVersion = "1.0.0";

/// Expected value of a check. `mode` is one of
///   "abs"  : |measured - value| <= tolerance
///   "rel"  : |measured - value| <= tolerance * |value|
///   "max"  : measured <= value
///   "min"  : measured >= value
///   "true" : measured is true
/// `source` names where the value comes from: "theory", "analytic",
/// "oracle", "config".
Json expectation(double value, double tolerance, std::string_view mode, std::string_view source);
Json expect_true(std::string_view source);

/// Applies an expectation to a measured number.
bool meets(const Json& expected, double measured);

struct CheckRecord {
  std::string name;
  std::string anchor;  // statement being checked
  Json inputs = Json::object();
  Json measured = Json::object();
  Json expected = Json::object();
  bool verdict = false;

  Json to_json() const;
};

struct VerificationReport {
  std::string name;
  Json config = Json::object();
  std::vector<CheckRecord> checks;
  Json runtime = Json::object();

  /// Conjunction of the check verdicts; false when there are no checks.
  bool verdict() const;
  Json to_json() const;
};

/// Writes `content` to `path` through a temporary file in the same
/// directory followed by a rename. Creates the parent directory.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// `<dir>/<report name>.json`, written atomically; returns the path.
std::filesystem::path write_report(const VerificationReport& report, const std::filesystem::path& dir);

/// CSV text with header `x1,x2[,x3],value`, one row per node in node order,
/// 17 significant digits.
std::string field_csv(const BoxGrid& grid, std::span<const double> values);
void dump_field(const BoxGrid& grid, std::span<const double> values, const std::filesystem::path& path);

}  // namespace greenlab
