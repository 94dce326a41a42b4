#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetsim/core_model.hpp"
#include "hetsim/error.hpp"

namespace hetsim {

/// Chunks per parallel phase when a profile does not specify one.
inline constexpr std::uint32_t kDefaultChunkCount = 512;

enum class PhaseKind { Serial, Parallel, Sync };

inline const char* to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::Serial: return "Serial";
    case PhaseKind::Parallel: return "Parallel";
    case PhaseKind::Sync: return "Sync";
  }
  return "?";
}

/// One stage of a profiled workload. Serial phases run on the main core,
/// Parallel phases are self-scheduled in equal chunks, Sync phases idle
/// every enabled core for a fixed barrier duration.
struct Phase {
  PhaseKind kind = PhaseKind::Serial;
  std::uint64_t instructions = 0;  // Serial/Parallel
  double sync_duration_s = 0.0;    // Sync
  std::uint32_t chunk_count = kDefaultChunkCount;  // Parallel
  InstructionMix mix;              // Serial/Parallel

  bool executes_instructions() const { return kind != PhaseKind::Sync; }

  std::uint64_t chunk_instructions() const { return instructions / chunk_count; }

  void validate(std::size_t index) const {
    const std::string where = "phase " + std::to_string(index);
    if (kind == PhaseKind::Sync) {
      if (sync_duration_s < 0.0) throw ValidationError(where + ": sync duration must be >= 0");
      return;
    }
    if (instructions == 0) throw ValidationError(where + ": instruction count must be > 0");
    try {
      mix.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (kind == PhaseKind::Parallel) {
      if (chunk_count < 1) throw ValidationError(where + ": chunk_count must be >= 1");
      if (instructions % chunk_count != 0) {
        throw ValidationError(where + ": instructions must divide into equal chunks" +
                              " (the loader pads the last chunk)");
      }
    }
  }
};

/// A profiled workload: ordered phases plus optional measured effective-CPI
/// overrides per core type (one value per workload per core, applied to all
/// phases). Immutable after load.
struct WorkloadProfile {
  std::string name;
  std::string dwarf;
  std::string bottleneck;
  std::vector<Phase> phases;
  std::map<std::string, double> cpi_overrides;

  std::optional<double> override_for(std::string_view core_type) const {
    auto it = cpi_overrides.find(std::string(core_type));
    if (it == cpi_overrides.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t total_instructions() const {
    std::uint64_t n = 0;
    for (const auto& p : phases) {
      if (p.executes_instructions()) n += p.instructions;
    }
    return n;
  }

  void validate() const {
    if (name.empty()) throw ValidationError("workload profile has an empty name");
    if (phases.empty()) throw ValidationError("workload '" + name + "': empty phase list");
    std::size_t first_serial = phases.size();
    std::size_t first_parallel = phases.size();
    for (std::size_t i = 0; i < phases.size(); ++i) {
      phases[i].validate(i);
      if (phases[i].kind == PhaseKind::Serial && first_serial == phases.size()) first_serial = i;
      if (phases[i].kind == PhaseKind::Parallel && first_parallel == phases.size())
        first_parallel = i;
    }
    if (first_serial < phases.size() && first_parallel < first_serial) {
      throw ValidationError("workload '" + name +
                            "': the first Serial phase must precede the first Parallel phase");
    }
    for (const auto& [type, cpi] : cpi_overrides) {
      if (!(cpi > 0.0)) {
        throw ValidationError("workload '" + name + "': cpi override for '" + type +
                              "' must be > 0");
      }
    }
  }
};

/// Wall time of the whole profile on a single reference core: every
/// instruction-executing phase runs at that core's effective CPI, sync
/// barriers keep their fixed duration.
inline double single_core_time_s(const WorkloadProfile& profile, const CoreTypeSpec& core) {
  const std::optional<double> ov = profile.override_for(core.name);
  double t = 0.0;
  for (const auto& p : profile.phases) {
    if (p.kind == PhaseKind::Sync) {
      t += p.sync_duration_s;
    } else {
      t += static_cast<double>(p.instructions) * effective_cpi(core, p.mix, ov) /
           core.frequency_hz;
    }
  }
  return t;
}

/// Share of single-core wall time spent in Serial phases, in [0,1].
inline double serial_fraction(const WorkloadProfile& profile, const CoreTypeSpec& reference) {
  profile.validate();
  const std::optional<double> ov = profile.override_for(reference.name);
  double serial = 0.0;
  double total = 0.0;
  for (const auto& p : profile.phases) {
    double dt = 0.0;
    if (p.kind == PhaseKind::Sync) {
      dt = p.sync_duration_s;
    } else {
      dt = static_cast<double>(p.instructions) * effective_cpi(reference, p.mix, ov) /
           reference.frequency_hz;
    }
    total += dt;
    if (p.kind == PhaseKind::Serial) serial += dt;
  }
  if (total <= 0.0) return 0.0;
  return serial / total;
}

}  // namespace hetsim
