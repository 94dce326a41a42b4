#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hetsim/core_model.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"

namespace hetsim {

/// One (config, workload) outcome in the delay/energy plane.
struct TradePoint {
  std::string config;
  std::string workload;
  double delay_s = 0.0;
  double energy_j = 0.0;
  double edp_js = 0.0;
  double area_mm2 = 0.0;
};

/// p dominates q on (delay, energy): no worse on both axes, strictly better
/// on at least one.
inline bool dominates(const TradePoint& p, const TradePoint& q) {
  return p.delay_s <= q.delay_s && p.energy_j <= q.energy_j &&
         (p.delay_s < q.delay_s || p.energy_j < q.energy_j);
}

/// Non-dominated subset, ascending delay / strictly descending energy.
/// Points equal on both axes collapse to the lexicographically smallest
/// config name.
inline std::vector<TradePoint> pareto_front(std::vector<TradePoint> points) {
  if (points.empty()) throw ValidationError("pareto_front: no points");
  std::sort(points.begin(), points.end(), [](const TradePoint& a, const TradePoint& b) {
    if (a.delay_s != b.delay_s) return a.delay_s < b.delay_s;
    if (a.energy_j != b.energy_j) return a.energy_j < b.energy_j;
    return a.config < b.config;
  });
  std::vector<TradePoint> front;
  for (const auto& p : points) {
    if (!front.empty() && !(p.energy_j < front.back().energy_j)) continue;  // dominated or dup
    front.push_back(p);
  }
  return front;
}

/// Coordinate-wise minimum over homogeneous (SMP) points, with the configs
/// that supplied each coordinate.
struct IdealPoint {
  double delay_s = 0.0;
  double energy_j = 0.0;
  std::string delay_config;
  std::string energy_config;

  double edp_js() const { return delay_s * energy_j; }
};

inline IdealPoint ideal_point(const std::vector<TradePoint>& smp_points) {
  if (smp_points.empty()) throw ValidationError("ideal_point: no SMP points");
  IdealPoint ideal;
  ideal.delay_s = smp_points.front().delay_s;
  ideal.energy_j = smp_points.front().energy_j;
  ideal.delay_config = smp_points.front().config;
  ideal.energy_config = smp_points.front().config;
  for (const auto& p : smp_points) {
    if (p.delay_s < ideal.delay_s || (p.delay_s == ideal.delay_s && p.config < ideal.delay_config)) {
      ideal.delay_s = p.delay_s;
      ideal.delay_config = p.config;
    }
    if (p.energy_j < ideal.energy_j ||
        (p.energy_j == ideal.energy_j && p.config < ideal.energy_config)) {
      ideal.energy_j = p.energy_j;
      ideal.energy_config = p.config;
    }
  }
  return ideal;
}

/// n log-spaced (delay, energy) samples of the constant-EDP curve
/// energy = edp / delay over [delay_min, delay_max].
inline std::vector<std::pair<double, double>> iso_edp_samples(double edp_js, double delay_min_s,
                                                              double delay_max_s, int n) {
  if (!(edp_js > 0.0)) throw ValidationError("iso_edp_samples: edp must be > 0");
  if (!(delay_min_s > 0.0) || !(delay_min_s < delay_max_s)) {
    throw ValidationError("iso_edp_samples: need 0 < delay_min < delay_max");
  }
  if (n < 2) throw ValidationError("iso_edp_samples: need at least 2 samples");
  std::vector<std::pair<double, double>> samples;
  samples.reserve(static_cast<std::size_t>(n));
  const double log_min = std::log(delay_min_s);
  const double log_max = std::log(delay_max_s);
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    const double d = (i == 0) ? delay_min_s
                   : (i == n - 1) ? delay_max_s
                                  : std::exp(log_min + f * (log_max - log_min));
    samples.emplace_back(d, edp_js / d);
  }
  return samples;
}

enum class TradeMetric { Delay, Energy, Edp };

inline double metric_value(const TradePoint& p, TradeMetric m) {
  switch (m) {
    case TradeMetric::Delay: return p.delay_s;
    case TradeMetric::Energy: return p.energy_j;
    case TradeMetric::Edp: return p.edp_js;
  }
  return 0.0;
}

/// Percent improvement of candidate over baseline; positive is better.
inline double improvement_pct(double baseline, double candidate) {
  if (!(baseline > 0.0)) throw ValidationError("improvement: baseline metric must be > 0");
  return 100.0 * (baseline - candidate) / baseline;
}

inline double improvement_pct(const TradePoint& baseline, const TradePoint& candidate,
                              TradeMetric metric) {
  return improvement_pct(metric_value(baseline, metric), metric_value(candidate, metric));
}

/// Total silicon of a configuration, disabled cores included.
inline double area_of(const SystemConfig& config, const CoreRegistry& registry) {
  double area = 0.0;
  for (const auto& slot : config.slots) {
    area += static_cast<double>(slot.count) * registry.at(slot.type).area_mm2;
  }
  return area;
}

inline double area_gain(const SystemConfig& baseline, const SystemConfig& candidate,
                        const CoreRegistry& registry) {
  return area_of(baseline, registry) / area_of(candidate, registry);
}

}  // namespace hetsim
