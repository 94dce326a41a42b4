#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hetsim/core_model.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/workload_model.hpp"

namespace hetsim {

inline constexpr std::uint32_t kDefaultTotalCores = 8;
inline constexpr const char* kDefaultBaselineConfig = "4A7+4A15";

/// Design-space query: which configurations to enumerate and simulate.
struct DseQuery {
  std::uint32_t total_cores = kDefaultTotalCores;
  /// Core type names in enumeration order; empty means every registry type
  /// ordered from least to most capable on an IntAlu-only mix.
  std::vector<std::string> core_types;
  std::map<std::string, std::uint32_t> min_per_type;
  std::map<std::string, std::uint32_t> max_per_type;
  /// Require at least one core of the most capable type.
  bool require_big = false;
  /// Allowed numbers of distinct core types present; empty means all.
  std::set<std::uint32_t> heterogeneity_levels;
  /// Workload names to simulate; empty means every loaded profile.
  std::vector<std::string> workloads;
  std::string baseline_config = kDefaultBaselineConfig;
  double mem_bandwidth_bps = kDefaultMemBandwidthBps;
  /// When set, skip enumeration and simulate exactly these named configs.
  std::vector<std::string> explicit_configs;
};

/// Named query presets mirroring the three studied architecture groups.
inline DseQuery preset_query(std::string_view preset) {
  DseQuery q;
  if (preset == "full") {
    return q;
  }
  if (preset == "paper-smp") {
    q.heterogeneity_levels = {1};
    return q;
  }
  if (preset == "paper-h2") {
    q.explicit_configs = {"4A7+4A15", "7A7+1A15", "7A9+1A15"};
    return q;
  }
  if (preset == "paper-h3") {
    q.min_per_type = {{"A7", 1}, {"A9", 1}, {"A15", 1}};
    return q;
  }
  throw ValidationError("unknown preset '" + std::string(preset) +
                        "' (expected full, paper-smp, paper-h2 or paper-h3)");
}

namespace detail {

inline std::vector<std::string> ordered_type_names(const DseQuery& query,
                                                   const CoreRegistry& registry) {
  if (!query.core_types.empty()) {
    for (const auto& t : query.core_types) registry.at(t);
    return query.core_types;
  }
  std::vector<std::string> names;
  for (const auto& t : registry.types()) names.push_back(t.name);
  const InstructionMix alu = InstructionMix::single(InstructionClass::IntAlu);
  std::stable_sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
    return throughput(registry.at(a), alu) < throughput(registry.at(b), alu);
  });
  return names;
}

}  // namespace detail

/// All integer compositions of total_cores over the query's core types that
/// satisfy its constraints, in lexicographic count order, canonically named.
inline std::vector<SystemConfig> enumerate_configs(const DseQuery& query,
                                                   const CoreRegistry& registry) {
  if (!query.explicit_configs.empty()) {
    std::vector<SystemConfig> configs;
    for (const auto& name : query.explicit_configs) {
      SystemConfig cfg;
      cfg.slots = parse_config_name(name, registry);
      cfg.mem_bandwidth_bps = query.mem_bandwidth_bps;
      cfg.name = canonical_config_name(cfg.slots, registry);
      cfg.validate();
      configs.push_back(std::move(cfg));
    }
    return configs;
  }

  if (query.total_cores < 1) throw ValidationError("enumerate_configs: total_cores must be >= 1");
  const std::vector<std::string> types = detail::ordered_type_names(query, registry);
  if (types.empty()) throw ValidationError("enumerate_configs: no core types");

  std::vector<std::uint32_t> lo(types.size(), 0);
  std::vector<std::uint32_t> hi(types.size(), query.total_cores);
  std::uint64_t min_sum = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (auto it = query.min_per_type.find(types[i]); it != query.min_per_type.end())
      lo[i] = it->second;
    if (auto it = query.max_per_type.find(types[i]); it != query.max_per_type.end())
      hi[i] = it->second;
  }
  if (query.require_big) {
    lo.back() = std::max<std::uint32_t>(lo.back(), 1);
  }
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (auto it = query.max_per_type.find(types[i]);
        it != query.max_per_type.end() && lo[i] > it->second) {
      throw ValidationError("enumerate_configs: min > max for type '" + types[i] + "'");
    }
    min_sum += lo[i];
  }
  if (min_sum > query.total_cores) {
    throw ValidationError("enumerate_configs: per-type minimums exceed total_cores=" +
                          std::to_string(query.total_cores));
  }

  std::vector<SystemConfig> configs;
  std::vector<std::uint32_t> counts(types.size(), 0);
  auto recurse = [&](auto&& self, std::size_t index, std::uint32_t remaining) -> void {
    if (index + 1 == types.size()) {
      if (remaining < lo[index] || remaining > hi[index]) return;
      counts[index] = remaining;
      std::uint32_t level = 0;
      for (std::uint32_t c : counts) level += (c > 0) ? 1 : 0;
      if (level == 0) return;
      if (!query.heterogeneity_levels.empty() && !query.heterogeneity_levels.count(level)) return;
      SystemConfig cfg;
      for (std::size_t i = 0; i < types.size(); ++i) {
        cfg.slots.push_back(ConfigSlot{types[i], counts[i], 0});
      }
      cfg.mem_bandwidth_bps = query.mem_bandwidth_bps;
      cfg.name = canonical_config_name(cfg.slots, registry);
      configs.push_back(std::move(cfg));
      return;
    }
    for (std::uint32_t c = lo[index]; c <= std::min(hi[index], remaining); ++c) {
      counts[index] = c;
      self(self, index + 1, remaining - c);
    }
  };
  recurse(recurse, 0, query.total_cores);
  if (configs.empty()) {
    throw ValidationError("enumerate_configs: constraints admit no configuration");
  }
  return configs;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct DseRow {
  std::string workload;
  std::string config;
  std::map<std::string, std::uint32_t> counts;
  double delay_s = 0.0;
  double energy_j = 0.0;
  double edp_js = 0.0;
  double area_mm2 = 0.0;
  bool pareto = false;
  bool best_edp = false;
  double impr_edp_vs_baseline_pct = 0.0;
  double area_gain_vs_baseline = 0.0;

  TradePoint point() const {
    return TradePoint{config, workload, delay_s, energy_j, edp_js, area_mm2};
  }
};

struct WorkloadReport {
  std::string workload;
  std::vector<DseRow> rows;
  TradePoint baseline;  // simulated even when outside the enumerated set
  std::string best_edp_config;
  double best_edp_js = 0.0;
  double impr_best_vs_baseline_pct = 0.0;
  std::optional<IdealPoint> ideal;  // present only when SMP points exist
  std::optional<double> impr_best_vs_ideal_pct;
};

struct DseReport {
  std::string baseline_config;
  std::vector<std::string> core_types;  // enumeration order
  std::vector<WorkloadReport> workloads;
  std::map<std::string, std::uint32_t> best_edp_tally;
};

/// Simulate every (workload, config) pair and assemble the ranked report.
/// `jobs` controls simulation parallelism only; the report is a deterministic
/// reduction keyed by (workload, config) and does not depend on it.
inline DseReport run_dse(const DseQuery& query, const CoreRegistry& registry,
                         const std::vector<WorkloadProfile>& all_profiles,
                         unsigned jobs = 1) {
  std::vector<const WorkloadProfile*> profiles;
  if (query.workloads.empty()) {
    for (const auto& p : all_profiles) profiles.push_back(&p);
  } else {
    for (const auto& name : query.workloads) {
      const WorkloadProfile* found = nullptr;
      for (const auto& p : all_profiles) {
        if (p.name == name) found = &p;
      }
      if (found == nullptr) throw ValidationError("run_dse: unknown workload '" + name + "'");
      profiles.push_back(found);
    }
  }
  if (profiles.empty()) throw ValidationError("run_dse: no workloads");

  const std::vector<SystemConfig> configs = enumerate_configs(query, registry);
  const std::vector<std::string> types = detail::ordered_type_names(query, registry);

  SystemConfig baseline_cfg;
  baseline_cfg.slots = parse_config_name(query.baseline_config, registry);
  baseline_cfg.mem_bandwidth_bps = query.mem_bandwidth_bps;
  baseline_cfg.name = canonical_config_name(baseline_cfg.slots, registry);
  const double baseline_area = area_of(baseline_cfg, registry);

  struct Job {
    const WorkloadProfile* profile;
    const SystemConfig* config;  // nullptr marks the baseline run
  };
  std::vector<Job> tasks;
  for (const auto* p : profiles) {
    tasks.push_back(Job{p, nullptr});
    for (const auto& c : configs) tasks.push_back(Job{p, &c});
  }

  std::vector<SimResult> results(tasks.size());
  auto worker_body = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const SystemConfig& cfg = tasks[i].config ? *tasks[i].config : baseline_cfg;
      try {
        results[i] = simulate(*tasks[i].profile, cfg, registry);
      } catch (const std::exception& e) {
        throw SimulationError("while simulating workload '" + tasks[i].profile->name +
                              "' on config '" + cfg.name + "': " + e.what());
      }
    }
  };
  if (jobs <= 1) {
    std::atomic<std::size_t> next{0};
    worker_body(next);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        try {
          worker_body(next);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  DseReport report;
  report.baseline_config = baseline_cfg.name;
  report.core_types = types;

  std::size_t task_index = 0;
  for (const auto* p : profiles) {
    WorkloadReport wr;
    wr.workload = p->name;
    const SimResult& base = results[task_index++];
    wr.baseline = TradePoint{baseline_cfg.name, p->name, base.delay_s, base.energy_j,
                             base.edp_js, baseline_area};

    std::vector<TradePoint> points;
    std::vector<TradePoint> smp_points;
    for (const auto& cfg : configs) {
      const SimResult& r = results[task_index++];
      DseRow row;
      row.workload = p->name;
      row.config = cfg.name;
      for (const auto& t : types) row.counts[t] = cfg.count_of(t);
      row.delay_s = r.delay_s;
      row.energy_j = r.energy_j;
      row.edp_js = r.edp_js;
      row.area_mm2 = area_of(cfg, registry);
      row.impr_edp_vs_baseline_pct = improvement_pct(wr.baseline.edp_js, row.edp_js);
      row.area_gain_vs_baseline = baseline_area / row.area_mm2;
      points.push_back(row.point());
      std::uint32_t level = 0;
      for (const auto& s : cfg.slots) level += (s.count > 0) ? 1 : 0;
      if (level == 1) smp_points.push_back(row.point());
      wr.rows.push_back(std::move(row));
    }

    const std::vector<TradePoint> front = pareto_front(points);
    for (auto& row : wr.rows) {
      for (const auto& f : front) {
        if (f.config == row.config && f.delay_s == row.delay_s &&
            f.energy_j == row.energy_j) {
          row.pareto = true;
        }
      }
    }

    const DseRow* best = &wr.rows.front();
    for (const auto& row : wr.rows) {
      if (row.edp_js < best->edp_js ||
          (row.edp_js == best->edp_js && row.config < best->config)) {
        best = &row;
      }
    }
    wr.best_edp_config = best->config;
    wr.best_edp_js = best->edp_js;
    wr.impr_best_vs_baseline_pct = improvement_pct(wr.baseline.edp_js, best->edp_js);
    for (auto& row : wr.rows) row.best_edp = (row.config == wr.best_edp_config);

    if (!smp_points.empty()) {
      wr.ideal = ideal_point(smp_points);
      wr.impr_best_vs_ideal_pct = improvement_pct(wr.ideal->edp_js(), best->edp_js);
    }

    report.best_edp_tally[wr.best_edp_config] += 1;
    report.workloads.push_back(std::move(wr));
  }
  return report;
}

}  // namespace hetsim
