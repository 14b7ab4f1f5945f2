// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "heightscope/harness.hpp"

namespace heightscope {

namespace {

std::string fixed5(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  return buf;
}

std::string general6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

OutputFormat format_from_name(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format '" + std::string(name) + "'");
}

std::string csv_header() { return "snr_db,method,pd,far,de,trials,wall_time_s"; }

std::string csv_line(const ResultRow& r) {
  return general6(r.snr_db) + "," + r.method + "," + fixed5(r.pd) + "," + fixed5(r.far) + "," +
         fixed5(r.de) + "," + std::to_string(r.trials) + "," + fixed5(r.wall_time_s);
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += csv_line(r) + "\n";
  return out;
}

std::string to_json(const std::vector<ResultRow>& rows, const ScenarioConfig& config,
                    const GammaTable& gamma) {
  // Numbers go through the CSV formatting so both outputs carry the same values.
  const auto same = [](const std::string& s) { return std::stod(s); };
  nlohmann::ordered_json j;
  j["config"] = serialize_config(config);
  j["seed"] = config.seed;
  j["gamma"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : gamma) j["gamma"][k] = v;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["snr_db"] = same(general6(r.snr_db));
    o["method"] = r.method;
    o["pd"] = same(fixed5(r.pd));
    o["far"] = same(fixed5(r.far));
    o["de"] = same(fixed5(r.de));
    o["trials"] = r.trials;
    o["wall_time_s"] = same(fixed5(r.wall_time_s));
    j["rows"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

std::filesystem::path emit(const std::vector<ResultRow>& rows, OutputFormat format,
                           const std::filesystem::path& dir, const ScenarioConfig& config,
                           const GammaTable& gamma) {
  if (rows.empty()) throw DomainError("no result rows to emit");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  const auto path = dir / (format == OutputFormat::Csv ? "results.csv" : "results.json");
  write_file(path, format == OutputFormat::Csv ? to_csv(rows) : to_json(rows, config, gamma));
  return path;
}

void write_gamma_sidecar(const std::filesystem::path& path, const ScenarioConfig& config,
                         const GammaTable& gamma) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "layout" << YAML::Value << config.layout;
  out << YAML::Key << "second_aperture" << YAML::Value << config.second_aperture;
  out << YAML::Key << "percentile" << YAML::Value << config.gamma.percentile;
  out << YAML::Key << "calibration_trials" << YAML::Value << config.gamma.calibration_trials;
  out << YAML::Key << "seed" << YAML::Value << config.seed;
  out << YAML::Key << "values" << YAML::Value << YAML::BeginMap;
  out.SetDoublePrecision(17);
  for (const auto& [k, v] : gamma) out << YAML::Key << k << YAML::Value << v;
  out << YAML::EndMap << YAML::EndMap;
  write_file(path, std::string(out.c_str()) + "\n");
}

GammaTable read_gamma_sidecar(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("gamma sidecar '" + path.string() + "': " + e.what());
  }
  GammaTable table;
  const auto values = root["values"];
  if (!values || !values.IsMap())
    throw ConfigError("gamma sidecar '" + path.string() + "' has no values mapping");
  for (auto it = values.begin(); it != values.end(); ++it)
    table[it->first.as<std::string>()] = it->second.as<double>();
  return table;
}

}  // namespace heightscope
