// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "heightscope/harness.hpp"

namespace heightscope {

std::string method_name(Method m) {
  switch (m) {
    case Method::GroupSparse: return "gs";
    case Method::StepByStep: return "sbys";
    case Method::Music: return "music";
    case Method::Burg: return "burg";
  }
  return "?";
}

Method method_from_name(std::string_view name) {
  for (Method m : {Method::GroupSparse, Method::StepByStep, Method::Music, Method::Burg})
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool is_sparse(Method m) { return m == Method::GroupSparse || m == Method::StepByStep; }

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<AzimuthStage> kStages[] = {{AzimuthStage::Skip, "skip"},
                                              {AzimuthStage::LowAngle, "i"},
                                              {AzimuthStage::SpatialFrequency, "ii"},
                                              {AzimuthStage::Multipath, "iii"}};
constexpr EnumName<SceneMode> kModes[] = {{SceneMode::SameAzimuth, "same_azimuth"},
                                          {SceneMode::TwoDimensional, "2d"}};
constexpr EnumName<LabelOption> kLabels[] = {{LabelOption::A, "a"}, {LabelOption::B, "b"}};
constexpr EnumName<Pooling> kPoolings[] = {{Pooling::Mean, "mean"}, {Pooling::Max, "max"}};
constexpr EnumName<FalseAlarmRule> kRules[] = {{FalseAlarmRule::Above, "above"},
                                               {FalseAlarmRule::Outside, "outside"}};
constexpr EnumName<FarMode> kFarModes[] = {{FarMode::Pooled, "pooled"},
                                           {FarMode::PerTrial, "per_trial"}};

template <class E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

int line_of(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

// Parse context: remembers the line of every key for later validation errors.
struct Lines {
  std::map<std::string, int> at;
  int operator()(const std::string& key) const {
    auto it = at.find(key);
    return it == at.end() ? 0 : it->second;
  }
};

class Section {
 public:
  Section(const YAML::Node& node, std::string prefix, std::initializer_list<const char*> keys,
          Lines& lines)
      : node_(node), prefix_(std::move(prefix)), lines_(lines) {
    if (!node_.IsMap()) throw ConfigError(where("") + "expected a mapping", line_of(node_));
    std::set<std::string> allowed;
    for (const char* k : keys) allowed.insert(k);
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (!allowed.count(key))
        throw ConfigError("unknown key '" + prefix_ + key + "'", line_of(it->first));
      lines_.at[prefix_ + key] = line_of(it->first);
    }
  }

  YAML::Node child(const char* key) const { return node_[key]; }
  std::string path(const char* key) const { return prefix_ + key; }

  template <class T>
  void get(const char* key, T& out) const {
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      if (!v.IsScalar()) throw YAML::Exception(v.Mark(), "not a scalar");
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where(key) + "invalid value", line_of(v));
    }
  }

  void get(const char* key, Complex& out) const {
    const YAML::Node v = node_[key];
    if (v) out = complex_of(v, path(key));
  }

  template <class E, std::size_t N>
  void get_enum(const char* key, const EnumName<E> (&table)[N], E& out) const {
    std::string s;
    get(key, s);
    if (!node_[key]) return;
    for (const auto& e : table)
      if (s == e.name) {
        out = e.value;
        return;
      }
    throw ConfigError(where(key) + "unknown value '" + s + "'", line_of(node_[key]));
  }

  static Complex complex_of(const YAML::Node& v, const std::string& path) {
    try {
      if (v.IsScalar()) return {v.as<double>(), 0.0};
      if (v.IsSequence() && v.size() == 2) return {v[0].as<double>(), v[1].as<double>()};
    } catch (const YAML::Exception&) {
    }
    throw ConfigError(path + ": expected a number or [re, im]", line_of(v));
  }

 private:
  std::string where(const char* key) const { return prefix_ + key + ": "; }

  YAML::Node node_;
  std::string prefix_;
  Lines& lines_;
};

void fail(const std::string& key, const std::string& what, const Lines& lines) {
  throw ConfigError(key + ": " + what, lines(key));
}

void validate(const ScenarioConfig& c, const Lines& lines) {
  const auto names = preset_names();
  const auto known = [&](const std::string& n) {
    return std::find(names.begin(), names.end(), n) != names.end();
  };
  if (!known(c.layout)) fail("layout", "unknown preset '" + c.layout + "'", lines);
  if (!c.second_aperture.empty() && !known(c.second_aperture))
    fail("second_aperture", "unknown preset '" + c.second_aperture + "'", lines);
  if (!(c.wavelength > 0.0)) fail("wavelength", "must be positive", lines);
  try {
    make_trajectory(c.trajectory.start, c.trajectory.end, c.trajectory.interval,
                    c.trajectory.step);
  } catch (const DomainError& e) {
    fail("trajectory", e.what(), lines);
  }
  const auto& g = c.grids;
  if (!(g.azimuth_step_deg > 0.0) || !(g.azimuth_max_deg >= g.azimuth_min_deg))
    fail("grids", "invalid azimuth grid", lines);
  if (!(g.height_step > 0.0) || !(g.height_max >= g.height_min) || g.height_min < 0.0)
    fail("grids", "invalid height grid", lines);
  if (g.coarse_heights < 1) fail("grids.coarse_heights", "must be at least 1", lines);
  if (!(std::abs(g.theta_max_deg) < 90.0)) fail("grids.theta_max_deg", "must be below 90", lines);
  if (c.rho_grid.empty()) fail("rho_grid", "must not be empty", lines);
  for (const auto& r : c.rho_grid)
    if (!(std::abs(r) <= 1.0)) fail("rho_grid", "|rho| must not exceed 1", lines);
  if (!(std::abs(c.rho_true) <= 1.0)) fail("rho_true", "|rho| must not exceed 1", lines);
  if (c.snr_db.empty()) fail("snr_db", "must not be empty", lines);
  for (double s : c.snr_db)
    if (!std::isfinite(s)) fail("snr_db", "values must be finite", lines);
  if (c.trials < 1) fail("trials", "must be at least 1", lines);
  if (c.methods.empty()) fail("methods", "must not be empty", lines);
  if (std::set<Method>(c.methods.begin(), c.methods.end()).size() != c.methods.size())
    fail("methods", "duplicate entries", lines);
  const auto& s = c.scene;
  if (s.targets != 1 && s.targets != 2) fail("scene.targets", "must be 1 or 2", lines);
  if (!(s.h_max >= s.h_min) || s.h_min < 0.0) fail("scene", "invalid height bounds", lines);
  const auto& v = c.solver;
  try {
    StopRule{v.sparsity, v.residual_fraction}.validate();
  } catch (const DomainError& e) {
    fail("solver", e.what(), lines);
  }
  if (v.azimuth_sparsity < 1) fail("solver.azimuth_sparsity", "must be at least 1", lines);
  if (!(v.rank_tolerance > 0.0) || !(v.rank_tolerance < 1.0))
    fail("solver.rank_tolerance", "must lie in (0, 1)", lines);
  if (!(c.scoring.dtw > 0.0)) fail("scoring.dtw", "must be positive", lines);
  if (!(c.scoring.azimuth_window_deg >= 0.0))
    fail("scoring.azimuth_window_deg", "must be non-negative", lines);
  const auto& b = c.baseline;
  if (!(b.antenna_height > 0.0)) fail("baseline.antenna_height", "must be positive", lines);
  if (b.burg_order < 1) fail("baseline.burg_order", "must be at least 1", lines);
  if (b.music_subspace < 1) fail("baseline.music_subspace", "must be at least 1", lines);
  if (b.hankel_rows < 0) fail("baseline.hankel_rows", "must be non-negative", lines);
  if (b.frequency_bins < 2) fail("baseline.frequency_bins", "must be at least 2", lines);
  if (b.resample < 0) fail("baseline.resample", "must be non-negative", lines);
  if (!(c.gamma.percentile > 0.0) || !(c.gamma.percentile <= 100.0))
    fail("gamma.percentile", "must lie in (0, 100]", lines);
  if (c.gamma.calibration_trials < 1) fail("gamma.calibration_trials", "must be at least 1", lines);
  for (const auto& [k, val] : c.gamma.values)
    if (!(val >= 0.0)) fail("gamma.values", "thresholds must be non-negative", lines);
}

ScenarioConfig from_yaml(const YAML::Node& root) {
  ScenarioConfig c;
  Lines lines;
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  const Section top(root,
                    "",
                    {"layout", "second_aperture", "wavelength", "trajectory", "grids", "rho_grid",
                     "rho_true", "snr_db", "trials", "methods", "azimuth_stage", "scene", "solver",
                     "scoring", "baseline", "gamma", "seed", "output"},
                    lines);
  top.get("layout", c.layout);
  top.get("second_aperture", c.second_aperture);
  top.get("wavelength", c.wavelength);
  top.get("rho_true", c.rho_true);
  top.get("trials", c.trials);
  top.get("seed", c.seed);
  top.get("output", c.output);
  top.get_enum("azimuth_stage", kStages, c.azimuth_stage);

  if (const auto n = top.child("trajectory")) {
    const Section s(n, "trajectory.", {"start", "end", "interval", "step"}, lines);
    s.get("start", c.trajectory.start);
    s.get("end", c.trajectory.end);
    s.get("interval", c.trajectory.interval);
    s.get("step", c.trajectory.step);
  }
  if (const auto n = top.child("grids")) {
    const Section s(n, "grids.",
                    {"azimuth_min_deg", "azimuth_max_deg", "azimuth_step_deg", "height_min",
                     "height_max", "height_step", "coarse_heights", "theta_max_deg"},
                    lines);
    s.get("azimuth_min_deg", c.grids.azimuth_min_deg);
    s.get("azimuth_max_deg", c.grids.azimuth_max_deg);
    s.get("azimuth_step_deg", c.grids.azimuth_step_deg);
    s.get("height_min", c.grids.height_min);
    s.get("height_max", c.grids.height_max);
    s.get("height_step", c.grids.height_step);
    s.get("coarse_heights", c.grids.coarse_heights);
    s.get("theta_max_deg", c.grids.theta_max_deg);
  }
  if (const auto n = top.child("rho_grid")) {
    if (!n.IsSequence()) throw ConfigError("rho_grid: expected a list", line_of(n));
    c.rho_grid.clear();
    for (const auto& e : n) c.rho_grid.push_back(Section::complex_of(e, "rho_grid"));
  }
  if (const auto n = top.child("snr_db")) {
    if (!n.IsSequence()) throw ConfigError("snr_db: expected a list", line_of(n));
    c.snr_db.clear();
    for (const auto& e : n) {
      try {
        c.snr_db.push_back(e.as<double>());
      } catch (const YAML::Exception&) {
        throw ConfigError("snr_db: invalid value", line_of(e));
      }
    }
  }
  if (const auto n = top.child("methods")) {
    if (!n.IsSequence()) throw ConfigError("methods: expected a list", line_of(n));
    c.methods.clear();
    for (const auto& e : n) {
      try {
        c.methods.push_back(method_from_name(e.as<std::string>()));
      } catch (const std::exception& ex) {
        throw ConfigError(std::string("methods: ") + ex.what(), line_of(e));
      }
    }
  }
  if (const auto n = top.child("scene")) {
    const Section s(n, "scene.", {"targets", "mode", "azimuth_deg", "h_min", "h_max", "on_grid"},
                    lines);
    s.get("targets", c.scene.targets);
    s.get_enum("mode", kModes, c.scene.mode);
    s.get("azimuth_deg", c.scene.azimuth_deg);
    s.get("h_min", c.scene.h_min);
    s.get("h_max", c.scene.h_max);
    s.get("on_grid", c.scene.on_grid);
  }
  if (const auto n = top.child("solver")) {
    const Section s(n, "solver.",
                    {"labels", "sparsity", "azimuth_sparsity", "residual_fraction",
                     "rank_tolerance", "pooling", "aperture_weighting",
                     "inverse_distance_weighting"},
                    lines);
    s.get_enum("labels", kLabels, c.solver.labels);
    s.get("sparsity", c.solver.sparsity);
    s.get("azimuth_sparsity", c.solver.azimuth_sparsity);
    s.get("residual_fraction", c.solver.residual_fraction);
    s.get("rank_tolerance", c.solver.rank_tolerance);
    s.get_enum("pooling", kPoolings, c.solver.pooling);
    s.get("aperture_weighting", c.solver.aperture_weighting);
    s.get("inverse_distance_weighting", c.solver.inverse_distance_weighting);
  }
  if (const auto n = top.child("scoring")) {
    const Section s(n, "scoring.", {"dtw", "azimuth_window_deg", "false_alarms", "far_mode"},
                    lines);
    s.get("dtw", c.scoring.dtw);
    s.get("azimuth_window_deg", c.scoring.azimuth_window_deg);
    s.get_enum("false_alarms", kRules, c.scoring.false_alarms);
    s.get_enum("far_mode", kFarModes, c.scoring.far_mode);
  }
  if (const auto n = top.child("baseline")) {
    const Section s(n, "baseline.",
                    {"antenna_height", "snr_boost", "burg_order", "music_subspace", "hankel_rows",
                     "frequency_bins", "resample"},
                    lines);
    s.get("antenna_height", c.baseline.antenna_height);
    s.get("snr_boost", c.baseline.snr_boost);
    s.get("burg_order", c.baseline.burg_order);
    s.get("music_subspace", c.baseline.music_subspace);
    s.get("hankel_rows", c.baseline.hankel_rows);
    s.get("frequency_bins", c.baseline.frequency_bins);
    s.get("resample", c.baseline.resample);
  }
  if (const auto n = top.child("gamma")) {
    const Section s(n, "gamma.", {"percentile", "calibration_trials", "sidecar", "values"}, lines);
    s.get("percentile", c.gamma.percentile);
    s.get("calibration_trials", c.gamma.calibration_trials);
    s.get("sidecar", c.gamma.sidecar);
    if (const auto v = s.child("values")) {
      if (!v.IsMap()) throw ConfigError("gamma.values: expected a mapping", line_of(v));
      for (auto it = v.begin(); it != v.end(); ++it) {
        try {
          c.gamma.values[it->first.as<std::string>()] = it->second.as<double>();
        } catch (const YAML::Exception&) {
          throw ConfigError("gamma.values: invalid value", line_of(it->second));
        }
      }
    }
  }
  validate(c, lines);
  return c;
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void emit_complex(YAML::Emitter& out, Complex z) {
  if (z.imag() == 0.0) {
    out << num(z.real());
  } else {
    out << YAML::Flow << YAML::BeginSeq << num(z.real()) << num(z.imag()) << YAML::EndSeq;
  }
}

}  // namespace

ScenarioConfig parse_config_text(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("malformed YAML: " + e.msg, e.mark.line + 1);
  }
  return from_yaml(root);
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const ScenarioConfig& config) { validate(config, Lines{}); }

std::string serialize_config(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "layout" << YAML::Value << c.layout;
  out << YAML::Key << "second_aperture" << YAML::Value << c.second_aperture;
  out << YAML::Key << "wavelength" << YAML::Value << num(c.wavelength);
  out << YAML::Key << "trajectory" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "start" << YAML::Value << num(c.trajectory.start);
  out << YAML::Key << "end" << YAML::Value << num(c.trajectory.end);
  out << YAML::Key << "interval" << YAML::Value << num(c.trajectory.interval);
  out << YAML::Key << "step" << YAML::Value << num(c.trajectory.step);
  out << YAML::EndMap;
  out << YAML::Key << "grids" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "azimuth_min_deg" << YAML::Value << num(c.grids.azimuth_min_deg);
  out << YAML::Key << "azimuth_max_deg" << YAML::Value << num(c.grids.azimuth_max_deg);
  out << YAML::Key << "azimuth_step_deg" << YAML::Value << num(c.grids.azimuth_step_deg);
  out << YAML::Key << "height_min" << YAML::Value << num(c.grids.height_min);
  out << YAML::Key << "height_max" << YAML::Value << num(c.grids.height_max);
  out << YAML::Key << "height_step" << YAML::Value << num(c.grids.height_step);
  out << YAML::Key << "coarse_heights" << YAML::Value << c.grids.coarse_heights;
  out << YAML::Key << "theta_max_deg" << YAML::Value << num(c.grids.theta_max_deg);
  out << YAML::EndMap;
  out << YAML::Key << "rho_grid" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& r : c.rho_grid) emit_complex(out, r);
  out << YAML::EndSeq;
  out << YAML::Key << "rho_true" << YAML::Value;
  emit_complex(out, c.rho_true);
  out << YAML::Key << "snr_db" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double s : c.snr_db) out << num(s);
  out << YAML::EndSeq;
  out << YAML::Key << "trials" << YAML::Value << c.trials;
  out << YAML::Key << "methods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Method m : c.methods) out << method_name(m);
  out << YAML::EndSeq;
  out << YAML::Key << "azimuth_stage" << YAML::Value << name_of(kStages, c.azimuth_stage);
  out << YAML::Key << "scene" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "targets" << YAML::Value << c.scene.targets;
  out << YAML::Key << "mode" << YAML::Value << name_of(kModes, c.scene.mode);
  out << YAML::Key << "azimuth_deg" << YAML::Value << num(c.scene.azimuth_deg);
  out << YAML::Key << "h_min" << YAML::Value << num(c.scene.h_min);
  out << YAML::Key << "h_max" << YAML::Value << num(c.scene.h_max);
  out << YAML::Key << "on_grid" << YAML::Value << c.scene.on_grid;
  out << YAML::EndMap;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "labels" << YAML::Value << name_of(kLabels, c.solver.labels);
  out << YAML::Key << "sparsity" << YAML::Value << c.solver.sparsity;
  out << YAML::Key << "azimuth_sparsity" << YAML::Value << c.solver.azimuth_sparsity;
  out << YAML::Key << "residual_fraction" << YAML::Value << num(c.solver.residual_fraction);
  out << YAML::Key << "rank_tolerance" << YAML::Value << num(c.solver.rank_tolerance);
  out << YAML::Key << "pooling" << YAML::Value << name_of(kPoolings, c.solver.pooling);
  out << YAML::Key << "aperture_weighting" << YAML::Value << c.solver.aperture_weighting;
  out << YAML::Key << "inverse_distance_weighting" << YAML::Value
      << c.solver.inverse_distance_weighting;
  out << YAML::EndMap;
  out << YAML::Key << "scoring" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dtw" << YAML::Value << num(c.scoring.dtw);
  out << YAML::Key << "azimuth_window_deg" << YAML::Value << num(c.scoring.azimuth_window_deg);
  out << YAML::Key << "false_alarms" << YAML::Value << name_of(kRules, c.scoring.false_alarms);
  out << YAML::Key << "far_mode" << YAML::Value << name_of(kFarModes, c.scoring.far_mode);
  out << YAML::EndMap;
  out << YAML::Key << "baseline" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "antenna_height" << YAML::Value << num(c.baseline.antenna_height);
  out << YAML::Key << "snr_boost" << YAML::Value << c.baseline.snr_boost;
  out << YAML::Key << "burg_order" << YAML::Value << c.baseline.burg_order;
  out << YAML::Key << "music_subspace" << YAML::Value << c.baseline.music_subspace;
  out << YAML::Key << "hankel_rows" << YAML::Value << c.baseline.hankel_rows;
  out << YAML::Key << "frequency_bins" << YAML::Value << c.baseline.frequency_bins;
  out << YAML::Key << "resample" << YAML::Value << c.baseline.resample;
  out << YAML::EndMap;
  out << YAML::Key << "gamma" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "percentile" << YAML::Value << num(c.gamma.percentile);
  out << YAML::Key << "calibration_trials" << YAML::Value << c.gamma.calibration_trials;
  out << YAML::Key << "sidecar" << YAML::Value << c.gamma.sidecar;
  out << YAML::Key << "values" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : c.gamma.values) out << YAML::Key << k << YAML::Value << num(v);
  out << YAML::EndMap;
  out << YAML::EndMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "output" << YAML::Value << c.output;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

AntennaLayout build_layout(const ScenarioConfig& c) {
  if (c.second_aperture.empty()) return preset_layout(c.layout);
  return combine_layouts({preset_layout(c.layout), preset_layout(c.second_aperture)});
}

Trajectory build_trajectory(const ScenarioConfig& c) {
  return make_trajectory(c.trajectory.start, c.trajectory.end, c.trajectory.interval,
                         c.trajectory.step);
}

HypothesisGrid build_grid(const ScenarioConfig& c) {
  HypothesisGrid g;
  for (double a : uniform_grid(c.grids.azimuth_min_deg, c.grids.azimuth_max_deg,
                               c.grids.azimuth_step_deg))
    g.azimuths.push_back(deg2rad(a));
  g.heights = uniform_grid(c.grids.height_min, c.grids.height_max, c.grids.height_step);
  // Coarse bins at the centers of equal segments of the height range.
  const double span = c.grids.height_max - c.grids.height_min;
  for (int k = 0; k < c.grids.coarse_heights; ++k)
    g.coarse_heights.push_back(c.grids.height_min + span * (k + 0.5) / c.grids.coarse_heights);
  g.rhos = c.rho_grid;
  g.theta_max = deg2rad(c.grids.theta_max_deg);
  return g;
}

EstimatorSettings build_settings(const ScenarioConfig& c) {
  EstimatorSettings s;
  s.wavelength = c.wavelength;
  s.grid = build_grid(c);
  s.labels = c.solver.labels;
  s.pooling = c.solver.pooling;
  s.sparsity = c.solver.sparsity;
  s.residual_fraction = c.solver.residual_fraction;
  s.azimuth_sparsity = c.solver.azimuth_sparsity;
  s.solver.rank_tolerance = c.solver.rank_tolerance;
  s.aperture_weighting = c.solver.aperture_weighting;
  s.inverse_distance_weighting = c.solver.inverse_distance_weighting;
  return s;
}

ScoringRules build_rules(const ScenarioConfig& c) {
  ScoringRules r;
  r.dtw = c.scoring.dtw;
  r.azimuth_window = deg2rad(c.scoring.azimuth_window_deg);
  r.protocol = c.scene.mode == SceneMode::SameAzimuth ? Protocol::HighestScatterer
                                                      : Protocol::AllTargets;
  r.false_alarms = c.scoring.false_alarms;
  return r;
}

SceneOptions build_scene_options(const ScenarioConfig& c) {
  SceneOptions o;
  o.n_targets = c.scene.targets;
  o.mode = c.scene.mode;
  o.h_min = c.scene.h_min;
  o.h_max = c.scene.h_max;
  o.on_grid = c.scene.on_grid;
  o.height_step = c.grids.height_step;
  o.azimuth = deg2rad(c.scene.azimuth_deg);
  o.azimuth_bins = build_grid(c).azimuths;
  return o;
}

}  // namespace heightscope
