#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hetsim/hetsim.hpp"

namespace hetsim::test {

inline std::filesystem::path data_dir() { return std::filesystem::path(HETSIM_DATA_DIR); }

inline CoreRegistry shipped_cores() { return load_cores(data_dir() / "cores/default_cores.json"); }

inline WorkloadProfile shipped_profile(const std::string& name, const CoreRegistry& registry) {
  return load_profile(data_dir() / "profiles" / (name + ".json"), &registry);
}

inline std::vector<WorkloadProfile> shipped_profiles(const CoreRegistry& registry) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir() / "profiles")) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<WorkloadProfile> profiles;
  for (const auto& f : files) profiles.push_back(load_profile(f, &registry));
  return profiles;
}

/// One-type registry for scalar examples: 1 GHz, CPI 1 everywhere.
inline CoreTypeSpec unit_core(const std::string& name, double freq_hz = 1e9, double cpi = 1.0) {
  CoreTypeSpec c;
  c.name = name;
  c.frequency_hz = freq_hz;
  c.cpi.fill(cpi);
  c.out_of_order = false;
  c.dynamic_power_w = 1.0;
  c.static_power_w = 0.1;
  c.area_mm2 = 1.0;
  c.bytes_per_mem_instr = 8.0;
  return c;
}

inline InstructionMix alu_mix() { return InstructionMix::single(InstructionClass::IntAlu); }

inline Phase serial_phase(std::uint64_t instructions, InstructionMix mix) {
  Phase p;
  p.kind = PhaseKind::Serial;
  p.instructions = instructions;
  p.mix = mix;
  return p;
}

inline Phase parallel_phase(std::uint64_t instructions, std::uint32_t chunks, InstructionMix mix) {
  Phase p;
  p.kind = PhaseKind::Parallel;
  p.instructions = instructions;
  p.chunk_count = chunks;
  p.mix = mix;
  return p;
}

inline Phase sync_phase(double duration_s) {
  Phase p;
  p.kind = PhaseKind::Sync;
  p.sync_duration_s = duration_s;
  return p;
}

inline WorkloadProfile simple_profile(const std::string& name, std::vector<Phase> phases) {
  WorkloadProfile w;
  w.name = name;
  w.phases = std::move(phases);
  return w;
}

}  // namespace hetsim::test
