// SPDX-License-Identifier: Apache-2.0
#include "heightscope/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace heightscope {

std::vector<Complex> default_rho_grid() { return {-0.1, -0.3, -0.5, -0.7, -0.9}; }

StopRule EstimatorSettings::height_stop() const { return {sparsity, residual_fraction}; }

double HeightEstimate::max_value() const {
  double m = 0.0;
  for (const auto& map : maps)
    for (double v : map.values) m = std::max(m, v);
  return m;
}

SequentialEstimator::SequentialEstimator(AntennaLayout layout, Trajectory trajectory,
                                         EstimatorSettings settings)
    : layout_(std::move(layout)),
      trajectory_(std::move(trajectory)),
      settings_(std::move(settings)) {
  layout_.validate();
  ref_ = layout_.reference();
  if (trajectory_.intervals.empty()) throw DomainError("trajectory has no intervals");
  check_grid(settings_.grid.azimuths, "azimuth");
  check_grid(settings_.grid.heights, "height");
  if (settings_.grid.rhos.empty()) throw DomainError("rho grid is empty");
  settings_.height_stop().validate();
  std::size_t most = 0;
  for (const auto& a : layout_.apertures) most = std::max(most, a.virtual_count());
  for (const auto& a : layout_.apertures)
    aperture_weight_.push_back(settings_.aperture_weighting
                                   ? std::sqrt(static_cast<double>(a.virtual_count()) / most)
                                   : 1.0);
}

CVector SequentialEstimator::prepared(const Snapshot& s) const {
  CVector y = normalize(s.y).y * aperture_weight_.at(s.aperture_index);
  if (settings_.inverse_distance_weighting) y *= trajectory_.ranges.back() / s.range;
  return y;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> SequentialEstimator::groupings(
    std::size_t interval, Fusion fusion) const {
  const auto& points = trajectory_.intervals.at(interval);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  if (fusion == Fusion::GroupSparse) out.emplace_back();
  for (std::size_t p : points) {
    if (fusion == Fusion::StepByStep) out.emplace_back();
    for (std::size_t a = 0; a < layout_.apertures.size(); ++a) out.back().emplace_back(a, p);
  }
  return out;
}

namespace {

std::vector<Eigen::Index> level_channels(const CoherentAperture& full, const CoherentAperture& sub) {
  std::vector<Eigen::Index> idx;
  for (std::size_t t = 0; t < full.tx.size(); ++t) {
    if (std::find(sub.tx.begin(), sub.tx.end(), full.tx[t]) == sub.tx.end()) continue;
    for (std::size_t q = 0; q < full.rx.size(); ++q)
      if (std::find(sub.rx.begin(), sub.rx.end(), full.rx[q]) != sub.rx.end())
        idx.push_back(static_cast<Eigen::Index>(t * full.rx.size() + q));
  }
  return idx;
}

// Least recently used plans are dropped once the cached dictionaries exceed
// this many bytes. Plans still in use stay alive through their shared_ptr.
constexpr std::size_t kPlanCacheBytes = std::size_t{1} << 30;

}  // namespace

std::shared_ptr<const SequentialEstimator::Plan> SequentialEstimator::cached(
    const PlanKey& key) const {
  const auto it = cache_.find(key);
  if (it == cache_.end()) return nullptr;
  it->second.last_use = ++cache_clock_;
  return it->second.plan;
}

void SequentialEstimator::store(PlanKey key, std::shared_ptr<const Plan> plan) const {
  std::size_t bytes = 0;
  for (const auto& solver : plan->solvers)
    for (const auto& block : solver->system().blocks)
      bytes += 2 * static_cast<std::size_t>(block->matrix.size()) * sizeof(Complex);  // + bases
  while (!cache_.empty() && cache_bytes_ + bytes > kPlanCacheBytes) {
    auto oldest = cache_.begin();
    for (auto it = cache_.begin(); it != cache_.end(); ++it)
      if (it->second.last_use < oldest->second.last_use) oldest = it;
    cache_bytes_ -= oldest->second.bytes;
    cache_.erase(oldest);
  }
  cache_bytes_ += bytes;
  cache_.emplace(std::move(key), CacheEntry{std::move(plan), bytes, ++cache_clock_});
}

std::shared_ptr<const SequentialEstimator::Plan> SequentialEstimator::height_plan(
    std::size_t interval, std::span<const double> azimuths, Fusion fusion) const {
  PlanKey key{0, static_cast<int>(fusion), interval, {azimuths.begin(), azimuths.end()}};
  std::lock_guard lock(mutex_);
  if (auto hit = cached(key)) return hit;

  auto plan = std::make_shared<Plan>();
  plan->members = groupings(interval, fusion);
  plan->channels.assign(layout_.apertures.size(), {});
  const auto& g = settings_.grid;
  for (const auto& members : plan->members) {
    BlockSystem system;
    for (auto [a, p] : members) {
      auto d = std::make_shared<Dictionary>(
          normalize(height_dictionary(azimuths, g.heights, g.rhos, layout_.apertures[a], ref_,
                                      trajectory_.ranges[p], settings_.wavelength,
                                      settings_.labels)));
      plan->shape = d->shape;
      if (plan->columns.empty()) plan->columns = d->columns;
      system.blocks.push_back(std::move(d));
    }
    system.labels =
        fused_labels(settings_.labels, plan->shape, static_cast<int>(system.blocks.size()));
    plan->solvers.push_back(std::make_unique<BompSolver>(std::move(system), settings_.solver));
  }
  store(std::move(key), plan);
  return plan;
}

std::shared_ptr<const SequentialEstimator::Plan> SequentialEstimator::azimuth_plan(
    std::size_t interval, AzimuthStrategy strategy, Fusion fusion) const {
  PlanKey key{1 + static_cast<int>(strategy), static_cast<int>(fusion), interval, {}};
  std::lock_guard lock(mutex_);
  if (auto hit = cached(key)) return hit;

  auto plan = std::make_shared<Plan>();
  plan->members = groupings(interval, fusion);
  const auto& g = settings_.grid;
  std::vector<CoherentAperture> used;
  for (const auto& ap : layout_.apertures) {
    if (strategy == AzimuthStrategy::Multipath) {
      used.push_back(ap);
      plan->channels.emplace_back();
    } else {
      used.push_back(level_subarray(ap));
      plan->channels.push_back(level_channels(ap, used.back()));
    }
  }
  // Case ii bins sit on the edge of the admissible disc, one per azimuth.
  std::vector<UV> uv;
  const double radius = std::cos(g.theta_max);
  for (double phi : g.azimuths) uv.push_back({radius * std::cos(phi), radius * std::sin(phi)});
  const LabelOption option =
      strategy == AzimuthStrategy::Multipath ? LabelOption::A : settings_.labels;

  for (const auto& members : plan->members) {
    BlockSystem system;
    for (auto [a, p] : members) {
      const double r = trajectory_.ranges[p];
      Dictionary d;
      switch (strategy) {
        case AzimuthStrategy::LowAngle:
          d = azimuth_dictionary_case_i(g.azimuths, used[a], ref_, r, settings_.wavelength);
          break;
        case AzimuthStrategy::SpatialFrequency:
          d = azimuth_dictionary_case_ii(uv, g.theta_max, used[a], ref_, r, settings_.wavelength);
          break;
        case AzimuthStrategy::Multipath:
          d = azimuth_dictionary_case_iii(g.azimuths, g.coarse_heights, g.rhos, used[a], ref_, r,
                                          settings_.wavelength);
          break;
      }
      auto nd = std::make_shared<Dictionary>(normalize(std::move(d)));
      plan->shape = nd->shape;
      if (plan->columns.empty()) plan->columns = nd->columns;
      system.blocks.push_back(std::move(nd));
    }
    system.labels = fused_labels(option, plan->shape, static_cast<int>(system.blocks.size()));
    plan->solvers.push_back(std::make_unique<BompSolver>(std::move(system), settings_.solver));
  }
  store(std::move(key), plan);
  return plan;
}

CVector SequentialEstimator::stacked(const Plan& plan, std::size_t solve,
                                     const SnapshotGrid& snaps) const {
  const auto& members = plan.members[solve];
  std::vector<double> weight(layout_.apertures.size(), 1.0);
  if (settings_.aperture_weighting) {
    std::vector<double> count(layout_.apertures.size());
    double most = 0.0;
    for (std::size_t a = 0; a < count.size(); ++a) {
      count[a] = plan.channels[a].empty()
                     ? static_cast<double>(layout_.apertures[a].virtual_count())
                     : static_cast<double>(plan.channels[a].size());
      most = std::max(most, count[a]);
    }
    for (std::size_t a = 0; a < count.size(); ++a) weight[a] = std::sqrt(count[a] / most);
  }
  std::vector<CVector> parts;
  Eigen::Index rows = 0;
  for (auto [a, p] : members) {
    const Snapshot& s = snaps.at(a).at(p);
    CVector y;
    if (plan.channels[a].empty()) {
      y = s.y;
    } else {
      y.resize(static_cast<Eigen::Index>(plan.channels[a].size()));
      for (std::size_t k = 0; k < plan.channels[a].size(); ++k) y(static_cast<Eigen::Index>(k)) = s.y(plan.channels[a][k]);
    }
    y = normalize(y).y * weight[a];
    if (settings_.inverse_distance_weighting) y *= trajectory_.ranges.back() / s.range;
    rows += y.size();
    parts.push_back(std::move(y));
  }
  CVector out(rows);
  Eigen::Index at = 0;
  for (const auto& v : parts) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

HypothesisMap SequentialEstimator::azimuth_map(const SnapshotGrid& snaps, std::size_t interval,
                                               AzimuthStrategy strategy, Fusion fusion) const {
  const auto plan = azimuth_plan(interval, strategy, fusion);
  const GridShape& shape = plan->shape;
  HypothesisMap out;
  out.values.assign(static_cast<std::size_t>(shape.naz), 0.0);
  for (std::size_t k = 0; k < static_cast<std::size_t>(shape.naz); ++k) {
    ColumnHypothesis h;
    h.azimuth = settings_.grid.azimuths[k];
    out.bins.push_back(h);
  }
  const StopRule stop = StopRule::sparsity(settings_.azimuth_sparsity);
  for (std::size_t s = 0; s < plan->solvers.size(); ++s) {
    const BompSolver& solver = *plan->solvers[s];
    const Reconstruction rec = solver.solve(stacked(*plan, s, snaps), stop);
    const auto offsets = solver.system().col_offsets();
    for (std::size_t b = 0; b + 1 < offsets.size(); ++b) {
      const CVector xb = rec.coefficients.segment(offsets[b], offsets[b + 1] - offsets[b]);
      const std::vector<CVector> one{xb};
      const HypothesisMap cols = doa_map(one);
      const HypothesisMap pooled = azimuth_pool(cols, shape, settings_.pooling);
      for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += pooled.values[k];
    }
  }
  return out;
}

std::vector<double> SequentialEstimator::estimate_azimuth(const SnapshotGrid& snaps,
                                                          std::size_t interval,
                                                          AzimuthStrategy strategy,
                                                          Fusion fusion, double gamma) const {
  std::vector<double> out;
  for (const auto& d : declare(azimuth_map(snaps, interval, strategy, fusion), gamma))
    out.push_back(d.hypothesis.azimuth);
  return out;
}

double SequentialEstimator::azimuth_map_max(const SnapshotGrid& snaps, AzimuthStrategy strategy,
                                            Fusion fusion) const {
  double m = 0.0;
  for (std::size_t j = 0; j < trajectory_.intervals.size(); ++j)
    for (double v : azimuth_map(snaps, j, strategy, fusion).values) m = std::max(m, v);
  return m;
}

std::vector<HypothesisMap> SequentialEstimator::interval_height_maps(
    const SnapshotGrid& snaps, std::size_t interval, std::span<const double> azimuths,
    Fusion fusion) const {
  const auto plan = height_plan(interval, azimuths, fusion);
  const GridShape& shape = plan->shape;
  std::vector<HypothesisMap> maps = height_map(CVector::Zero(shape.columns()), shape,
                                               settings_.pooling, plan->columns);
  std::size_t blocks = 0;
  for (std::size_t s = 0; s < plan->solvers.size(); ++s) {
    const BompSolver& solver = *plan->solvers[s];
    const Reconstruction rec = solver.solve(stacked(*plan, s, snaps), settings_.height_stop());
    const auto offsets = solver.system().col_offsets();
    for (std::size_t b = 0; b + 1 < offsets.size(); ++b, ++blocks) {
      const auto part = height_map(rec.coefficients.segment(offsets[b], shape.columns()), shape,
                                   settings_.pooling);
      for (std::size_t a = 0; a < maps.size(); ++a)
        for (std::size_t h = 0; h < maps[a].values.size(); ++h)
          maps[a].values[h] += part[a].values[h];
    }
  }
  for (auto& m : maps)
    for (double& v : m.values) v /= static_cast<double>(blocks);
  return maps;
}

HeightEstimate SequentialEstimator::estimate_height(const SnapshotGrid& snaps,
                                                    std::span<const double> azimuths,
                                                    Fusion fusion) const {
  HeightEstimate est;
  est.azimuths.assign(azimuths.begin(), azimuths.end());
  const std::size_t n = trajectory_.intervals.size();
  for (std::size_t j = 0; j < n; ++j) {
    auto maps = interval_height_maps(snaps, j, azimuths, fusion);
    if (est.maps.empty()) {
      est.maps = std::move(maps);
      continue;
    }
    for (std::size_t a = 0; a < maps.size(); ++a)
      for (std::size_t h = 0; h < maps[a].values.size(); ++h)
        est.maps[a].values[h] += maps[a].values[h];
  }
  for (auto& m : est.maps)
    for (double& v : m.values) v /= static_cast<double>(n);
  return est;
}

HeightEstimate SequentialEstimator::estimate(const SnapshotGrid& snaps, AzimuthStrategy strategy,
                                             Fusion fusion, double gamma_azimuth) const {
  std::map<double, HypothesisMap> pooled;
  const std::size_t n = trajectory_.intervals.size();
  for (std::size_t j = 0; j < n; ++j) {
    const auto az = estimate_azimuth(snaps, j, strategy, fusion, gamma_azimuth);
    if (az.empty()) continue;
    auto maps = interval_height_maps(snaps, j, az, fusion);
    for (std::size_t a = 0; a < az.size(); ++a) {
      auto [it, fresh] = pooled.try_emplace(az[a], maps[a]);
      if (!fresh)
        for (std::size_t h = 0; h < maps[a].values.size(); ++h)
          it->second.values[h] += maps[a].values[h];
    }
  }
  HeightEstimate est;
  for (auto& [phi, map] : pooled) {
    for (double& v : map.values) v /= static_cast<double>(n);
    est.azimuths.push_back(phi);
    est.maps.push_back(std::move(map));
  }
  return est;
}

std::vector<Declaration> declarations_from(const HeightEstimate& estimate, double gamma) {
  std::vector<Declaration> out;
  for (std::size_t a = 0; a < estimate.maps.size(); ++a)
    for (const auto& d : declare(estimate.maps[a], gamma))
      out.push_back({estimate.azimuths[a], d.hypothesis.height, d.value, -1});
  return out;
}

TrialResult score_trial(std::vector<Declaration> declarations, std::vector<Scatterer> truth,
                        const ScoringRules& rules) {
  if (!(rules.dtw > 0.0)) throw DomainError("detection window must be positive");
  constexpr double slack = 1e-9;
  TrialResult r;
  r.declarations = std::move(declarations);
  r.truth = std::move(truth);
  r.target_detected.assign(r.truth.size(), false);
  if (r.truth.empty()) {
    r.false_alarms = static_cast<int>(r.declarations.size());
    return r;
  }

  if (rules.protocol == Protocol::HighestScatterer) {
    const std::size_t top = highest_scatterer(r.truth);
    const double h = r.truth[top].height;
    r.targets_scored = 1;
    for (const auto& d : r.declarations) {
      const double off = d.height - h;
      if (std::abs(off) <= rules.dtw + slack)
        r.detected = true;
      else if (rules.false_alarms == FalseAlarmRule::Outside || off > 0.0)
        ++r.false_alarms;
    }
    r.target_detected[top] = r.detected;
    r.targets_detected = r.detected ? 1 : 0;
    return r;
  }

  r.targets_scored = static_cast<int>(r.truth.size());
  const auto hits = [&](const Declaration& d, const Scatterer& s) {
    return std::abs(d.azimuth - s.azimuth) <= rules.azimuth_window + slack &&
           std::abs(d.height - s.height) <= rules.dtw + slack;
  };
  for (const auto& d : r.declarations) {
    bool matched = false;
    for (std::size_t k = 0; k < r.truth.size(); ++k)
      if (hits(d, r.truth[k])) {
        matched = true;
        r.target_detected[k] = true;
      }
    if (!matched) ++r.false_alarms;
  }
  r.targets_detected = static_cast<int>(
      std::count(r.target_detected.begin(), r.target_detected.end(), true));
  r.detected = r.targets_detected == r.targets_scored;
  return r;
}

Metrics aggregate_metrics(std::span<const TrialResult> trials, FarMode mode) {
  if (trials.empty()) throw DomainError("no trials to aggregate");
  long scored = 0, detected = 0, fa = 0, decl = 0, ratio_trials = 0;
  double ratio_sum = 0.0;
  for (const auto& t : trials) {
    scored += t.targets_scored;
    detected += t.targets_detected;
    fa += t.false_alarms;
    decl += static_cast<long>(t.declarations.size());
    if (!t.declarations.empty()) {
      ratio_sum += static_cast<double>(t.false_alarms) / static_cast<double>(t.declarations.size());
      ++ratio_trials;
    }
  }
  Metrics m;
  m.trials = trials.size();
  m.pd = scored > 0 ? static_cast<double>(detected) / static_cast<double>(scored) : 0.0;
  if (mode == FarMode::Pooled)
    m.far = decl > 0 ? static_cast<double>(fa) / static_cast<double>(decl) : 0.0;
  else
    m.far = ratio_trials > 0 ? ratio_sum / static_cast<double>(ratio_trials) : 0.0;
  m.de = m.pd * (1.0 - m.far);
  return m;
}

}  // namespace heightscope
