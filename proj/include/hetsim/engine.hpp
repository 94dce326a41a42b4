#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hetsim/core_model.hpp"
#include "hetsim/error.hpp"
#include "hetsim/workload_model.hpp"

namespace hetsim {

/// Shared memory bandwidth available to all cores jointly, bytes/second.
inline constexpr double kDefaultMemBandwidthBps = 25.6e9;

/// Cluster-level L2 size annotation, 1 MiB. Informational only.
inline constexpr std::uint64_t kDefaultL2PerClusterBytes = 1u << 20;

// ---------------------------------------------------------------------------
// System configuration
// ---------------------------------------------------------------------------

struct ConfigSlot {
  std::string type;
  std::uint32_t count = 0;
  std::uint32_t disabled = 0;  // power-gated instances, contribute nothing

  std::uint32_t enabled() const { return count - disabled; }
};

/// A multiset of core types plus the shared memory bandwidth cap.
struct SystemConfig {
  std::string name;
  std::vector<ConfigSlot> slots;
  double mem_bandwidth_bps = kDefaultMemBandwidthBps;
  std::uint64_t l2_per_cluster_bytes = kDefaultL2PerClusterBytes;

  std::uint32_t total_cores() const {
    std::uint32_t n = 0;
    for (const auto& s : slots) n += s.count;
    return n;
  }

  std::uint32_t enabled_cores() const {
    std::uint32_t n = 0;
    for (const auto& s : slots) n += s.enabled();
    return n;
  }

  std::uint32_t count_of(std::string_view type) const {
    for (const auto& s : slots) {
      if (s.type == type) return s.count;
    }
    return 0;
  }

  void validate() const {
    if (slots.empty()) throw ValidationError("system config '" + name + "' has no slots");
    for (const auto& s : slots) {
      if (s.type.empty()) throw ValidationError("system config '" + name + "': empty slot type");
      if (s.disabled > s.count) {
        throw ValidationError("system config '" + name + "': slot '" + s.type +
                              "' disables more cores than it has");
      }
    }
    if (!(mem_bandwidth_bps > 0.0)) {
      throw ValidationError("system config '" + name + "': mem_bandwidth_bps must be > 0");
    }
  }
};

/// Canonical configuration name: counts joined by '+', listing types from
/// the least to the most capable on an IntAlu-only mix (e.g. "4A7+4A15").
/// Zero-count slots are omitted.
inline std::string canonical_config_name(const std::vector<ConfigSlot>& slots,
                                         const CoreRegistry& registry) {
  std::vector<const ConfigSlot*> present;
  for (const auto& s : slots) {
    if (s.count > 0) present.push_back(&s);
  }
  const InstructionMix alu = InstructionMix::single(InstructionClass::IntAlu);
  auto speed = [&](const ConfigSlot& s) { return throughput(registry.at(s.type), alu); };
  std::stable_sort(present.begin(), present.end(),
                   [&](const ConfigSlot* a, const ConfigSlot* b) { return speed(*a) < speed(*b); });
  std::string out;
  for (const ConfigSlot* s : present) {
    if (!out.empty()) out += '+';
    out += std::to_string(s->count) + s->type;
  }
  return out;
}

/// Parse a "<count><type>[+<count><type>...]" name back into slots.
inline std::vector<ConfigSlot> parse_config_name(std::string_view name,
                                                 const CoreRegistry& registry) {
  std::vector<ConfigSlot> slots;
  std::size_t pos = 0;
  while (pos < name.size()) {
    std::size_t plus = name.find('+', pos);
    if (plus == std::string_view::npos) plus = name.size();
    std::string_view token = name.substr(pos, plus - pos);
    std::size_t digits = 0;
    while (digits < token.size() && token[digits] >= '0' && token[digits] <= '9') ++digits;
    if (digits == 0 || digits == token.size()) {
      throw ValidationError("malformed config name '" + std::string(name) + "'");
    }
    ConfigSlot slot;
    slot.count = static_cast<std::uint32_t>(std::stoul(std::string(token.substr(0, digits))));
    slot.type = std::string(token.substr(digits));
    registry.at(slot.type);  // throws on unknown type
    slots.push_back(std::move(slot));
    pos = plus + 1;
  }
  if (slots.empty()) throw ValidationError("empty config name");
  return slots;
}

/// Build a config from per-type counts, canonically named.
inline SystemConfig make_config(const std::vector<std::pair<std::string, std::uint32_t>>& counts,
                                const CoreRegistry& registry,
                                double mem_bandwidth_bps = kDefaultMemBandwidthBps) {
  SystemConfig cfg;
  for (const auto& [type, count] : counts) {
    registry.at(type);
    cfg.slots.push_back(ConfigSlot{type, count, 0});
  }
  cfg.mem_bandwidth_bps = mem_bandwidth_bps;
  cfg.name = canonical_config_name(cfg.slots, registry);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Parallel-phase self-scheduling
// ---------------------------------------------------------------------------

struct ParallelSchedule {
  std::vector<std::uint32_t> core_of_chunk;
  std::vector<double> chunk_start_s;
  std::vector<double> chunk_end_s;
  std::vector<double> core_free_s;  // next-free time per core after the phase
  std::vector<double> core_busy_s;
  double makespan_s = 0.0;  // time when the last chunk completes
};

/// Dynamic self-scheduling with chunk size one: chunks are taken in index
/// order by the core with the smallest next-free time; ties go to the
/// smallest core index. All cores start free at `start_s`. Work-conserving
/// by construction. `duration` is any callable (chunk, core) -> seconds.
template <typename DurationFn>
ParallelSchedule schedule_parallel(std::size_t n_chunks, std::size_t n_cores,
                                   DurationFn&& duration, double start_s = 0.0) {
  if (n_chunks == 0) throw ValidationError("schedule_parallel: no chunks");
  if (n_cores == 0) throw ValidationError("schedule_parallel: no cores");
  ParallelSchedule s;
  s.core_of_chunk.resize(n_chunks);
  s.chunk_start_s.resize(n_chunks);
  s.chunk_end_s.resize(n_chunks);
  s.core_free_s.assign(n_cores, start_s);
  s.core_busy_s.assign(n_cores, 0.0);
  s.makespan_s = start_s;
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
    std::size_t core = 0;
    for (std::size_t i = 1; i < n_cores; ++i) {
      if (s.core_free_s[i] < s.core_free_s[core]) core = i;  // strict: keeps lowest index on ties
    }
    const double d = duration(chunk, core);
    if (!(d >= 0.0)) throw ValidationError("schedule_parallel: negative chunk duration");
    s.core_of_chunk[chunk] = static_cast<std::uint32_t>(core);
    s.chunk_start_s[chunk] = s.core_free_s[core];
    s.core_free_s[core] += d;
    s.chunk_end_s[chunk] = s.core_free_s[core];
    s.core_busy_s[core] += d;
    if (s.core_free_s[core] > s.makespan_s) s.makespan_s = s.core_free_s[core];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Memory-bandwidth contention
// ---------------------------------------------------------------------------

/// Unconstrained aggregate demand of a set of active cores, bytes/second.
/// `cpis[i]` is core i's effective CPI for the phase being scheduled.
inline double aggregate_mem_demand_bps(const std::vector<const CoreTypeSpec*>& active,
                                       const std::vector<double>& cpis, double mem_fraction) {
  double demand = 0.0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    demand += (active[i]->frequency_hz / cpis[i]) * mem_fraction * active[i]->bytes_per_mem_instr;
  }
  return demand;
}

/// Steady-state throttle factor: 1 while demand fits under the cap, else
/// demand/cap applied multiplicatively to every active core for the phase.
inline double contention_stretch(double demand_bps, double cap_bps) {
  if (!(cap_bps > 0.0)) throw ValidationError("memory bandwidth cap must be > 0");
  if (demand_bps <= cap_bps) return 1.0;
  return demand_bps / cap_bps;
}

// ---------------------------------------------------------------------------
// Energy accounting
// ---------------------------------------------------------------------------

/// Busy/idle power integration over one run: every enabled core draws its
/// static power for the whole delay and its dynamic power while busy.
/// Disabled cores are power-gated and contribute nothing.
inline double energy_of(const std::vector<double>& busy_s, double delay_s,
                        const std::vector<const CoreTypeSpec*>& enabled) {
  double energy = 0.0;
  for (std::size_t i = 0; i < enabled.size(); ++i) {
    energy += enabled[i]->static_power_w * delay_s + enabled[i]->dynamic_power_w * busy_s[i];
  }
  return energy;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct CoreActivity {
  std::uint32_t core_id = 0;
  std::string core_type;
  double busy_s = 0.0;
  double idle_s = 0.0;
  std::uint64_t instructions_executed = 0;
};

struct PhaseContention {
  std::uint32_t phase_index = 0;
  double stretch = 1.0;
  double demand_bps = 0.0;
  double consumed_bps = 0.0;  // min(demand, cap)
};

struct TraceEntry {
  std::uint64_t chunk_id = 0;
  std::uint32_t core_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SimResult {
  std::string workload;
  std::string config;
  double delay_s = 0.0;
  double energy_j = 0.0;
  double edp_js = 0.0;
  std::uint32_t main_core_id = 0;
  std::vector<CoreActivity> per_core;
  std::vector<PhaseContention> contention;
  std::vector<double> phase_end_s;
  std::vector<TraceEntry> trace;  // filled only when requested
};

struct SimOptions {
  bool record_trace = false;
  /// Fraction of dynamic power drawn by cores spinning at a Sync barrier.
  double idle_dynamic_fraction = 0.0;
};

namespace detail {

struct EnabledCore {
  const CoreTypeSpec* spec;
  std::optional<double> cpi_override;
};

inline std::vector<EnabledCore> expand_enabled_cores(const SystemConfig& config,
                                                     const CoreRegistry& registry,
                                                     const WorkloadProfile& profile) {
  std::vector<EnabledCore> cores;
  for (const auto& slot : config.slots) {
    const CoreTypeSpec* spec = registry.find(slot.type);
    if (spec == nullptr) {
      throw SimulationError("system config '" + config.name + "': unknown core type '" +
                            slot.type + "'");
    }
    if (slot.disabled > slot.count) {
      throw SimulationError("system config '" + config.name + "': slot '" + slot.type +
                            "' disables more cores than it has");
    }
    for (std::uint32_t i = 0; i < slot.enabled(); ++i) {
      cores.push_back(EnabledCore{spec, profile.override_for(slot.type)});
    }
  }
  return cores;
}

}  // namespace detail

/// Index of the enabled core that executes Serial phases: the one with the
/// highest throughput over the profile's instruction-executing phases,
/// ties broken by declaration order.
inline std::uint32_t pick_main_core(const std::vector<detail::EnabledCore>& cores,
                                    const WorkloadProfile& profile) {
  std::uint32_t best = 0;
  double best_time = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < cores.size(); ++i) {
    double t = 0.0;
    for (const auto& p : profile.phases) {
      if (!p.executes_instructions()) continue;
      t += static_cast<double>(p.instructions) *
           effective_cpi(*cores[i].spec, p.mix, cores[i].cpi_override) /
           cores[i].spec->frequency_hz;
    }
    if (t < best_time) {
      best_time = t;
      best = i;
    }
  }
  return best;
}

/// Deterministic discrete-event simulation of one profile on one config.
/// Identical inputs produce bit-identical results.
inline SimResult simulate(const WorkloadProfile& profile, const SystemConfig& config,
                          const CoreRegistry& registry, const SimOptions& options = {}) {
  profile.validate();
  config.validate();
  const auto cores = detail::expand_enabled_cores(config, registry, profile);
  if (cores.empty()) {
    throw SimulationError("system config '" + config.name + "': no enabled cores");
  }

  SimResult res;
  res.workload = profile.name;
  res.config = config.name;
  res.main_core_id = pick_main_core(cores, profile);

  const std::size_t n = cores.size();
  std::vector<double> busy(n, 0.0);
  std::vector<std::uint64_t> instr(n, 0);
  double t = 0.0;
  double sync_dynamic_j = 0.0;
  std::uint64_t next_chunk_id = 0;

  for (std::uint32_t pi = 0; pi < profile.phases.size(); ++pi) {
    const Phase& phase = profile.phases[pi];
    switch (phase.kind) {
      case PhaseKind::Serial: {
        const auto& main = cores[res.main_core_id];
        const double dt = static_cast<double>(phase.instructions) *
                          effective_cpi(*main.spec, phase.mix, main.cpi_override) /
                          main.spec->frequency_hz;
        busy[res.main_core_id] += dt;
        instr[res.main_core_id] += phase.instructions;
        t += dt;
        break;
      }
      case PhaseKind::Sync: {
        t += phase.sync_duration_s;
        if (options.idle_dynamic_fraction > 0.0) {
          for (const auto& c : cores) {
            sync_dynamic_j +=
                options.idle_dynamic_fraction * c.spec->dynamic_power_w * phase.sync_duration_s;
          }
        }
        break;
      }
      case PhaseKind::Parallel: {
        // Per-core effective CPI and the phase-wide contention stretch.
        std::vector<double> cpis(n);
        std::vector<const CoreTypeSpec*> specs(n);
        for (std::size_t i = 0; i < n; ++i) {
          cpis[i] = effective_cpi(*cores[i].spec, phase.mix, cores[i].cpi_override);
          specs[i] = cores[i].spec;
        }
        const double demand = aggregate_mem_demand_bps(specs, cpis, phase.mix.mem_fraction());
        const double stretch = contention_stretch(demand, config.mem_bandwidth_bps);
        res.contention.push_back(PhaseContention{
            pi, stretch, demand, std::min(demand, config.mem_bandwidth_bps)});

        const std::uint64_t chunk_instr = phase.chunk_instructions();
        std::vector<double> chunk_dur(n);
        for (std::size_t i = 0; i < n; ++i) {
          chunk_dur[i] = static_cast<double>(chunk_instr) * cpis[i] * stretch /
                         cores[i].spec->frequency_hz;
        }
        const ParallelSchedule sched = schedule_parallel(
            phase.chunk_count, n, [&](std::size_t, std::size_t core) { return chunk_dur[core]; },
            t);
        for (std::size_t i = 0; i < n; ++i) busy[i] += sched.core_busy_s[i];
        for (std::uint32_t c = 0; c < phase.chunk_count; ++c) {
          instr[sched.core_of_chunk[c]] += chunk_instr;
        }
        if (options.record_trace) {
          for (std::uint32_t c = 0; c < phase.chunk_count; ++c) {
            res.trace.push_back(TraceEntry{next_chunk_id + c, sched.core_of_chunk[c],
                                           sched.chunk_start_s[c], sched.chunk_end_s[c]});
          }
        }
        next_chunk_id += phase.chunk_count;
        t = sched.makespan_s;
        break;
      }
    }
    res.phase_end_s.push_back(t);
  }

  res.delay_s = t;
  std::vector<const CoreTypeSpec*> specs(n);
  for (std::size_t i = 0; i < n; ++i) specs[i] = cores[i].spec;
  res.energy_j = energy_of(busy, res.delay_s, specs) + sync_dynamic_j;
  res.edp_js = res.energy_j * res.delay_s;

  res.per_core.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.per_core[i].core_id = static_cast<std::uint32_t>(i);
    res.per_core[i].core_type = cores[i].spec->name;
    res.per_core[i].busy_s = busy[i];
    res.per_core[i].idle_s = std::max(0.0, res.delay_s - busy[i]);
    res.per_core[i].instructions_executed = instr[i];
  }
  return res;
}

}  // namespace hetsim
