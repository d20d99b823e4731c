#include "greenlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

#include "greenlab/errors.hpp"

namespace greenlab {

Json expectation(double value, double tolerance, std::string_view mode, std::string_view source) {
  return Json{{"value", value}, {"tolerance", tolerance}, {"mode", mode}, {"source", source}};
}

Json expect_true(std::string_view source) {
  return Json{{"value", true}, {"mode", "true"}, {"source", source}};
}

bool meets(const Json& e, double measured) {
  if (!std::isfinite(measured)) return false;
  const std::string mode = e.at("mode");
  if (mode == "true") return measured != 0.0;
  const double value = e.at("value");
  const double tol = e.value("tolerance", 0.0);
  if (mode == "abs") return std::abs(measured - value) <= tol;
  if (mode == "rel") return std::abs(measured - value) <= tol * std::abs(value);
  if (mode == "max") return measured <= value;
  if (mode == "min") return measured >= value;
  throw std::invalid_argument("unknown expectation mode '" + mode + "'");
}

Json CheckRecord::to_json() const {
  return Json{{"name", name},         {"anchor", anchor},     {"inputs", inputs},
              {"measured", measured}, {"expected", expected}, {"verdict", verdict ? "pass" : "fail"}};
}

bool VerificationReport::verdict() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.verdict) return false;
  return true;
}

Json VerificationReport::to_json() const {
  Json j;
  j["artifact"] = "greenlab";
  j["artifact_version"] = kArtifactVersion;
  j["name"] = name;
  j["config"] = config;
  j["runtime"] = runtime;
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  j["checks"] = std::move(arr);
  j["passed"] = static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.verdict; }));
  j["failed"] = static_cast<int>(checks.size()) - j["passed"].get<int>();
  j["verdict"] = verdict() ? "pass" : "fail";
  return j;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

std::filesystem::path write_report(const VerificationReport& report, const std::filesystem::path& dir) {
  const auto path = dir / (report.name + ".json");
  write_atomic(path, report.to_json().dump(2) + "\n");
  return path;
}

std::string field_csv(const BoxGrid& grid, std::span<const double> values) {
  if (static_cast<Index>(values.size()) != grid.node_count())
    throw ConfigError("field has " + std::to_string(values.size()) + " values for " +
                      std::to_string(grid.node_count()) + " nodes");
  const int d = grid.dim();
  std::string out = d == 2 ? "x1,x2,value\n" : "x1,x2,x3,value\n";
  out.reserve(out.size() + values.size() * 24 * (d + 1));
  char buf[40];
  for (Index i = 0; i < grid.node_count(); ++i) {
    const Point x = grid.coordinate(i);
    for (int k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,", x[k]);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", values[i]);
    out += buf;
  }
  return out;
}

void dump_field(const BoxGrid& grid, std::span<const double> values, const std::filesystem::path& path) {
  write_atomic(path, field_csv(grid, values));
}

}  // namespace greenlab
