#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsim/core_model.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"
#include "hetsim/explorer.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/version.hpp"
#include "hetsim/workload_model.hpp"

namespace hetsim {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kIsoSampleCount = 64;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

enum class Severity { Note, Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Note;
  std::string file;
  std::string message;

  std::string str() const {
    const char* tag = severity == Severity::Error     ? "error"
                      : severity == Severity::Warning ? "warning"
                                                      : "note";
    return std::string(tag) + ": " + (file.empty() ? "" : file + ": ") + message;
  }
};

// ---------------------------------------------------------------------------
// Run manifest, embedded in every output artifact
// ---------------------------------------------------------------------------

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string preset;

  ordered_json to_json() const {
    ordered_json j;
    j["tool"] = "hetsim";
    j["version"] = kVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (!preset.empty()) j["preset"] = preset;
    j["deterministic"] = true;  // no randomness anywhere in the pipeline
    return j;
  }

  std::string csv_comment() const {
    return "# hetsim output\n# manifest: " + to_json().dump() + "\n";
  }
};

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) {
      if (it.key() == k) ok = true;
    }
    if (!ok) throw ValidationError(context + ": unknown key '" + it.key() + "'");
  }
}

inline const json& require(const json& obj, const std::string& key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(context + ": missing required key '" + key + "'");
  return *it;
}

inline double as_double(const json& j, const std::string& context) {
  if (!j.is_number()) throw ValidationError(context + ": expected a number");
  return j.get<double>();
}

inline std::uint64_t as_uint(const json& j, const std::string& context) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ValidationError(context + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline std::string as_string(const json& j, const std::string& context) {
  if (!j.is_string()) throw ValidationError(context + ": expected a string");
  return j.get<std::string>();
}

inline void check_schema_version(const json& obj, const std::string& context) {
  const json& v = require(obj, "schema_version", context);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ValidationError(context + ": unsupported schema_version (expected " +
                          std::to_string(kSchemaVersion) + ")");
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("file '" + path.string() + "': " + e.what());
  }
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file '" + path.string() + "'");
  out << text;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Core-type definition files
// ---------------------------------------------------------------------------

inline CoreRegistry parse_cores(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ValidationError(source + ": expected a JSON object");
  detail::check_keys(doc, {"schema_version", "notes", "cores"}, source);
  detail::check_schema_version(doc, source);
  const json& cores = detail::require(doc, "cores", source);
  if (!cores.is_array() || cores.empty()) {
    throw ValidationError(source + ": 'cores' must be a non-empty array");
  }
  CoreRegistry registry;
  for (const json& c : cores) {
    const std::string ctx = source + ": core '" + c.value("name", "?") + "'";
    detail::check_keys(c,
                       {"name", "frequency_hz", "cpi", "out_of_order", "dynamic_power_w",
                        "static_power_w", "area_mm2", "bytes_per_mem_instr", "notes"},
                       ctx);
    CoreTypeSpec spec;
    spec.name = detail::as_string(detail::require(c, "name", ctx), ctx + ".name");
    spec.frequency_hz = detail::as_double(detail::require(c, "frequency_hz", ctx), ctx);
    const json& cpi = detail::require(c, "cpi", ctx);
    detail::check_keys(cpi,
                       {kInstructionClassNames.begin(), kInstructionClassNames.end()},
                       ctx + ".cpi");
    for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
      auto it = cpi.find(kInstructionClassNames[i]);
      if (it == cpi.end()) {
        throw ValidationError(ctx + ": missing cpi entry for " +
                              std::string(kInstructionClassNames[i]));
      }
      spec.cpi[i] = detail::as_double(*it, ctx + ".cpi." + kInstructionClassNames[i]);
    }
    const json& ooo = detail::require(c, "out_of_order", ctx);
    if (!ooo.is_boolean()) throw ValidationError(ctx + ": out_of_order must be a boolean");
    spec.out_of_order = ooo.get<bool>();
    spec.dynamic_power_w = detail::as_double(detail::require(c, "dynamic_power_w", ctx), ctx);
    spec.static_power_w = detail::as_double(detail::require(c, "static_power_w", ctx), ctx);
    spec.area_mm2 = detail::as_double(detail::require(c, "area_mm2", ctx), ctx);
    spec.bytes_per_mem_instr =
        detail::as_double(detail::require(c, "bytes_per_mem_instr", ctx), ctx);
    try {
      registry.add(std::move(spec));
    } catch (const ValidationError& e) {
      throw ValidationError(source + ": " + e.what());
    }
  }
  return registry;
}

inline CoreRegistry load_cores(const std::filesystem::path& path) {
  return parse_cores(detail::read_json_file(path), path.string());
}

inline ordered_json cores_to_json(const CoreRegistry& registry) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["cores"] = ordered_json::array();
  for (const auto& t : registry.types()) {
    ordered_json c;
    c["name"] = t.name;
    c["frequency_hz"] = t.frequency_hz;
    ordered_json cpi;
    for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
      cpi[kInstructionClassNames[i]] = t.cpi[i];
    }
    c["cpi"] = std::move(cpi);
    c["out_of_order"] = t.out_of_order;
    c["dynamic_power_w"] = t.dynamic_power_w;
    c["static_power_w"] = t.static_power_w;
    c["area_mm2"] = t.area_mm2;
    c["bytes_per_mem_instr"] = t.bytes_per_mem_instr;
    doc["cores"].push_back(std::move(c));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Workload profile files
// ---------------------------------------------------------------------------

inline InstructionMix parse_mix(const json& m, const std::string& context) {
  detail::check_keys(m, {kInstructionClassNames.begin(), kInstructionClassNames.end()}, context);
  InstructionMix mix;
  for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
    auto it = m.find(kInstructionClassNames[i]);
    if (it != m.end()) {
      mix.fractions[i] = detail::as_double(*it, context + "." + kInstructionClassNames[i]);
    }
  }
  const double sum = mix.sum();
  // The boundary cases 1 +- 1e-6 must be accepted despite representation error.
  if (std::abs(sum - 1.0) > 1e-6 * (1.0 + 1e-6)) {
    throw ValidationError(context + ": instruction mix fractions sum to " + format_double(sum) +
                          ", expected 1 within 1e-6");
  }
  // Renormalize tolerated drift. Sums already within rounding of 1 are left
  // untouched so that serialized profiles reload bit-exactly.
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& f : mix.fractions) f /= sum;
  }
  return mix;
}

/// Parse and validate a profile. When a registry is supplied, override names
/// must refer to known core types. Parallel phases whose instruction count
/// does not divide evenly are padded up to the next full chunk.
inline WorkloadProfile parse_profile(const json& doc, const std::string& source,
                                     const CoreRegistry* registry = nullptr) {
  if (!doc.is_object()) throw ValidationError(source + ": expected a JSON object");
  detail::check_keys(
      doc, {"schema_version", "name", "dwarf", "bottleneck", "notes", "cpi_overrides", "phases"},
      source);
  detail::check_schema_version(doc, source);
  WorkloadProfile profile;
  profile.name = detail::as_string(detail::require(doc, "name", source), source + ".name");
  profile.dwarf = doc.value("dwarf", "");
  profile.bottleneck = doc.value("bottleneck", "");
  if (auto it = doc.find("cpi_overrides"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError(source + ": cpi_overrides must be an object");
    for (auto ov = it->begin(); ov != it->end(); ++ov) {
      if (registry != nullptr && registry->find(ov.key()) == nullptr) {
        throw ValidationError(source + ": cpi_overrides names unknown core type '" + ov.key() +
                              "'");
      }
      profile.cpi_overrides[ov.key()] =
          detail::as_double(ov.value(), source + ".cpi_overrides." + ov.key());
    }
  }
  const json& phases = detail::require(doc, "phases", source);
  if (!phases.is_array() || phases.empty()) {
    throw ValidationError(source + ": workload '" + profile.name + "': empty phase list");
  }
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const json& p = phases[i];
    const std::string ctx = source + ": phase " + std::to_string(i);
    detail::check_keys(p, {"kind", "instructions", "duration_s", "chunk_count", "mix", "notes"},
                       ctx);
    const std::string kind = detail::as_string(detail::require(p, "kind", ctx), ctx + ".kind");
    Phase phase;
    if (kind == "Serial") {
      phase.kind = PhaseKind::Serial;
    } else if (kind == "Parallel") {
      phase.kind = PhaseKind::Parallel;
    } else if (kind == "Sync") {
      phase.kind = PhaseKind::Sync;
    } else {
      throw ValidationError(ctx + ": unknown kind '" + kind + "'");
    }
    if (phase.kind == PhaseKind::Sync) {
      if (p.contains("instructions") || p.contains("mix") || p.contains("chunk_count")) {
        throw ValidationError(ctx + ": Sync phases carry only duration_s");
      }
      phase.sync_duration_s = detail::as_double(detail::require(p, "duration_s", ctx), ctx);
      if (phase.sync_duration_s < 0.0) {
        throw ValidationError(ctx + ": duration_s must be >= 0");
      }
    } else {
      if (p.contains("duration_s")) {
        throw ValidationError(ctx + ": duration_s is only valid for Sync phases");
      }
      phase.instructions = detail::as_uint(detail::require(p, "instructions", ctx), ctx);
      if (phase.instructions == 0) {
        throw ValidationError(ctx + ": instruction count must be > 0");
      }
      phase.mix = parse_mix(detail::require(p, "mix", ctx), ctx + ".mix");
      if (phase.kind == PhaseKind::Parallel) {
        if (auto cc = p.find("chunk_count"); cc != p.end()) {
          phase.chunk_count = static_cast<std::uint32_t>(detail::as_uint(*cc, ctx));
          if (phase.chunk_count < 1) throw ValidationError(ctx + ": chunk_count must be >= 1");
        }
        const std::uint64_t rem = phase.instructions % phase.chunk_count;
        if (rem != 0) {
          phase.instructions += phase.chunk_count - rem;  // pad the last chunk to a full one
        }
      } else if (p.contains("chunk_count")) {
        throw ValidationError(ctx + ": chunk_count is only valid for Parallel phases");
      }
    }
    profile.phases.push_back(std::move(phase));
  }
  try {
    profile.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return profile;
}

inline WorkloadProfile load_profile(const std::filesystem::path& path,
                                    const CoreRegistry* registry = nullptr) {
  return parse_profile(detail::read_json_file(path), path.string(), registry);
}

inline ordered_json profile_to_json(const WorkloadProfile& profile) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = profile.name;
  if (!profile.dwarf.empty()) doc["dwarf"] = profile.dwarf;
  if (!profile.bottleneck.empty()) doc["bottleneck"] = profile.bottleneck;
  if (!profile.cpi_overrides.empty()) {
    ordered_json ov;
    for (const auto& [type, cpi] : profile.cpi_overrides) ov[type] = cpi;
    doc["cpi_overrides"] = std::move(ov);
  }
  doc["phases"] = ordered_json::array();
  for (const auto& p : profile.phases) {
    ordered_json ph;
    ph["kind"] = to_string(p.kind);
    if (p.kind == PhaseKind::Sync) {
      ph["duration_s"] = p.sync_duration_s;
    } else {
      ph["instructions"] = p.instructions;
      if (p.kind == PhaseKind::Parallel) ph["chunk_count"] = p.chunk_count;
      ordered_json mix;
      for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
        mix[kInstructionClassNames[i]] = p.mix.fractions[i];
      }
      ph["mix"] = std::move(mix);
    }
    doc["phases"].push_back(std::move(ph));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// System configuration files
// ---------------------------------------------------------------------------

inline SystemConfig parse_system(const json& doc, const std::string& source,
                                 const CoreRegistry* registry = nullptr) {
  if (!doc.is_object()) throw ValidationError(source + ": expected a JSON object");
  detail::check_keys(
      doc, {"schema_version", "name", "slots", "mem_bandwidth_bps", "l2_per_cluster_bytes",
            "notes"},
      source);
  detail::check_schema_version(doc, source);
  SystemConfig cfg;
  cfg.name = detail::as_string(detail::require(doc, "name", source), source + ".name");
  const json& slots = detail::require(doc, "slots", source);
  if (!slots.is_array() || slots.empty()) {
    throw ValidationError(source + ": 'slots' must be a non-empty array");
  }
  for (const json& s : slots) {
    const std::string ctx = source + ": slot";
    detail::check_keys(s, {"type", "count", "disabled"}, ctx);
    ConfigSlot slot;
    slot.type = detail::as_string(detail::require(s, "type", ctx), ctx + ".type");
    slot.count = static_cast<std::uint32_t>(detail::as_uint(detail::require(s, "count", ctx), ctx));
    if (auto d = s.find("disabled"); d != s.end()) {
      slot.disabled = static_cast<std::uint32_t>(detail::as_uint(*d, ctx));
    }
    if (registry != nullptr && registry->find(slot.type) == nullptr) {
      throw ValidationError(source + ": unknown core type '" + slot.type + "'");
    }
    cfg.slots.push_back(std::move(slot));
  }
  cfg.mem_bandwidth_bps =
      detail::as_double(detail::require(doc, "mem_bandwidth_bps", source), source);
  if (auto l2 = doc.find("l2_per_cluster_bytes"); l2 != doc.end()) {
    cfg.l2_per_cluster_bytes = detail::as_uint(*l2, source);
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return cfg;
}

inline SystemConfig load_system(const std::filesystem::path& path,
                                const CoreRegistry* registry = nullptr) {
  return parse_system(detail::read_json_file(path), path.string(), registry);
}

inline ordered_json system_to_json(const SystemConfig& cfg) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = cfg.name;
  doc["slots"] = ordered_json::array();
  for (const auto& s : cfg.slots) {
    ordered_json slot;
    slot["type"] = s.type;
    slot["count"] = s.count;
    slot["disabled"] = s.disabled;
    doc["slots"].push_back(std::move(slot));
  }
  doc["mem_bandwidth_bps"] = cfg.mem_bandwidth_bps;
  doc["l2_per_cluster_bytes"] = cfg.l2_per_cluster_bytes;
  return doc;
}

// ---------------------------------------------------------------------------
// Simulation result artifacts
// ---------------------------------------------------------------------------

inline ordered_json sim_result_to_json(const SimResult& res, const RunManifest* manifest = nullptr) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  if (manifest != nullptr) doc["manifest"] = manifest->to_json();
  doc["workload"] = res.workload;
  doc["config"] = res.config;
  doc["delay_s"] = res.delay_s;
  doc["energy_j"] = res.energy_j;
  doc["edp_js"] = res.edp_js;
  doc["main_core_id"] = res.main_core_id;
  doc["per_core"] = ordered_json::array();
  for (const auto& c : res.per_core) {
    ordered_json pc;
    pc["core_id"] = c.core_id;
    pc["core_type"] = c.core_type;
    pc["busy_s"] = c.busy_s;
    pc["idle_s"] = c.idle_s;
    pc["instructions_executed"] = c.instructions_executed;
    doc["per_core"].push_back(std::move(pc));
  }
  doc["contention"] = ordered_json::array();
  for (const auto& c : res.contention) {
    ordered_json pc;
    pc["phase_index"] = c.phase_index;
    pc["stretch"] = c.stretch;
    pc["demand_bps"] = c.demand_bps;
    pc["consumed_bps"] = c.consumed_bps;
    doc["contention"].push_back(std::move(pc));
  }
  return doc;
}

inline SimResult parse_sim_result(const json& doc, const std::string& source) {
  detail::check_schema_version(doc, source);
  SimResult res;
  res.workload = detail::as_string(detail::require(doc, "workload", source), source);
  res.config = detail::as_string(detail::require(doc, "config", source), source);
  res.delay_s = detail::as_double(detail::require(doc, "delay_s", source), source);
  res.energy_j = detail::as_double(detail::require(doc, "energy_j", source), source);
  res.edp_js = detail::as_double(detail::require(doc, "edp_js", source), source);
  res.main_core_id =
      static_cast<std::uint32_t>(detail::as_uint(detail::require(doc, "main_core_id", source), source));
  for (const json& c : detail::require(doc, "per_core", source)) {
    CoreActivity a;
    a.core_id = static_cast<std::uint32_t>(detail::as_uint(detail::require(c, "core_id", source), source));
    a.core_type = detail::as_string(detail::require(c, "core_type", source), source);
    a.busy_s = detail::as_double(detail::require(c, "busy_s", source), source);
    a.idle_s = detail::as_double(detail::require(c, "idle_s", source), source);
    a.instructions_executed = detail::as_uint(detail::require(c, "instructions_executed", source), source);
    res.per_core.push_back(std::move(a));
  }
  for (const json& c : detail::require(doc, "contention", source)) {
    PhaseContention pc;
    pc.phase_index = static_cast<std::uint32_t>(detail::as_uint(detail::require(c, "phase_index", source), source));
    pc.stretch = detail::as_double(detail::require(c, "stretch", source), source);
    pc.demand_bps = detail::as_double(detail::require(c, "demand_bps", source), source);
    pc.consumed_bps = detail::as_double(detail::require(c, "consumed_bps", source), source);
    res.contention.push_back(pc);
  }
  return res;
}

inline std::string trace_to_csv(const SimResult& res, const RunManifest* manifest = nullptr) {
  std::string out;
  if (manifest != nullptr) out += manifest->csv_comment();
  out += "chunk_id,core_id,core_type,start_s,end_s\n";
  for (const auto& e : res.trace) {
    out += std::to_string(e.chunk_id) + ',' + std::to_string(e.core_id) + ',' +
           res.per_core[e.core_id].core_type + ',' + format_double(e.start_s) + ',' +
           format_double(e.end_s) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// DSE report artifacts
// ---------------------------------------------------------------------------

inline const std::string kReportCsvHeader =
    "workload,config,n_a7,n_a9,n_a15,delay_s,energy_j,edp_js,area_mm2,pareto,best_edp,"
    "impr_edp_vs_baseline_pct,area_gain_vs_baseline";

inline std::string report_to_csv(const DseReport& report, const RunManifest* manifest = nullptr) {
  std::string out;
  if (manifest != nullptr) out += manifest->csv_comment();
  out += kReportCsvHeader + "\n";
  auto count_of = [](const DseRow& row, const char* type) -> std::uint32_t {
    auto it = row.counts.find(type);
    return it == row.counts.end() ? 0 : it->second;
  };
  for (const auto& wr : report.workloads) {
    for (const auto& row : wr.rows) {
      out += row.workload + ',' + row.config + ',' + std::to_string(count_of(row, "A7")) + ',' +
             std::to_string(count_of(row, "A9")) + ',' + std::to_string(count_of(row, "A15")) +
             ',' + format_double(row.delay_s) + ',' + format_double(row.energy_j) + ',' +
             format_double(row.edp_js) + ',' + format_double(row.area_mm2) + ',' +
             (row.pareto ? "1" : "0") + ',' + (row.best_edp ? "1" : "0") + ',' +
             format_double(row.impr_edp_vs_baseline_pct) + ',' +
             format_double(row.area_gain_vs_baseline) + '\n';
    }
  }
  return out;
}

inline ordered_json report_to_json(const DseReport& report, const RunManifest* manifest = nullptr) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  if (manifest != nullptr) doc["manifest"] = manifest->to_json();
  doc["baseline"] = report.baseline_config;
  doc["core_types"] = report.core_types;
  doc["workloads"] = ordered_json::array();
  for (const auto& wr : report.workloads) {
    ordered_json w;
    w["workload"] = wr.workload;
    w["best_edp_config"] = wr.best_edp_config;
    w["best_edp_js"] = wr.best_edp_js;
    w["improvement_edp_vs_baseline_pct"] = wr.impr_best_vs_baseline_pct;
    if (wr.impr_best_vs_ideal_pct.has_value()) {
      w["improvement_edp_vs_ideal_pct"] = *wr.impr_best_vs_ideal_pct;
    } else {
      w["improvement_edp_vs_ideal_pct"] = nullptr;
    }
    ordered_json b;
    b["config"] = wr.baseline.config;
    b["delay_s"] = wr.baseline.delay_s;
    b["energy_j"] = wr.baseline.energy_j;
    b["edp_js"] = wr.baseline.edp_js;
    w["baseline_point"] = std::move(b);
    if (wr.ideal.has_value()) {
      ordered_json ideal;
      ideal["delay_s"] = wr.ideal->delay_s;
      ideal["energy_j"] = wr.ideal->energy_j;
      ideal["delay_config"] = wr.ideal->delay_config;
      ideal["energy_config"] = wr.ideal->energy_config;
      w["ideal"] = std::move(ideal);
    } else {
      w["ideal"] = nullptr;
    }
    w["points"] = ordered_json::array();
    for (const auto& row : wr.rows) {
      ordered_json p;
      p["config"] = row.config;
      p["counts"] = row.counts;
      p["delay_s"] = row.delay_s;
      p["energy_j"] = row.energy_j;
      p["edp_js"] = row.edp_js;
      p["area_mm2"] = row.area_mm2;
      p["pareto"] = row.pareto;
      p["best_edp"] = row.best_edp;
      p["impr_edp_vs_baseline_pct"] = row.impr_edp_vs_baseline_pct;
      p["area_gain_vs_baseline"] = row.area_gain_vs_baseline;
      w["points"].push_back(std::move(p));
    }
    doc["workloads"].push_back(std::move(w));
  }
  doc["best_edp_tally"] = report.best_edp_tally;
  return doc;
}

inline DseReport parse_report(const json& doc, const std::string& source) {
  detail::check_schema_version(doc, source);
  DseReport report;
  report.baseline_config = detail::as_string(detail::require(doc, "baseline", source), source);
  for (const json& t : detail::require(doc, "core_types", source)) {
    report.core_types.push_back(t.get<std::string>());
  }
  for (const json& w : detail::require(doc, "workloads", source)) {
    WorkloadReport wr;
    wr.workload = detail::as_string(detail::require(w, "workload", source), source);
    wr.best_edp_config = detail::as_string(detail::require(w, "best_edp_config", source), source);
    wr.best_edp_js = detail::as_double(detail::require(w, "best_edp_js", source), source);
    wr.impr_best_vs_baseline_pct =
        detail::as_double(detail::require(w, "improvement_edp_vs_baseline_pct", source), source);
    if (const json& iv = detail::require(w, "improvement_edp_vs_ideal_pct", source); !iv.is_null()) {
      wr.impr_best_vs_ideal_pct = iv.get<double>();
    }
    const json& b = detail::require(w, "baseline_point", source);
    wr.baseline.config = detail::as_string(detail::require(b, "config", source), source);
    wr.baseline.workload = wr.workload;
    wr.baseline.delay_s = detail::as_double(detail::require(b, "delay_s", source), source);
    wr.baseline.energy_j = detail::as_double(detail::require(b, "energy_j", source), source);
    wr.baseline.edp_js = detail::as_double(detail::require(b, "edp_js", source), source);
    if (const json& ij = detail::require(w, "ideal", source); !ij.is_null()) {
      IdealPoint ideal;
      ideal.delay_s = detail::as_double(detail::require(ij, "delay_s", source), source);
      ideal.energy_j = detail::as_double(detail::require(ij, "energy_j", source), source);
      ideal.delay_config = detail::as_string(detail::require(ij, "delay_config", source), source);
      ideal.energy_config = detail::as_string(detail::require(ij, "energy_config", source), source);
      wr.ideal = std::move(ideal);
    }
    for (const json& p : detail::require(w, "points", source)) {
      DseRow row;
      row.workload = wr.workload;
      row.config = detail::as_string(detail::require(p, "config", source), source);
      for (auto it = detail::require(p, "counts", source).begin();
           it != detail::require(p, "counts", source).end(); ++it) {
        row.counts[it.key()] = it.value().get<std::uint32_t>();
      }
      row.delay_s = detail::as_double(detail::require(p, "delay_s", source), source);
      row.energy_j = detail::as_double(detail::require(p, "energy_j", source), source);
      row.edp_js = detail::as_double(detail::require(p, "edp_js", source), source);
      row.area_mm2 = detail::as_double(detail::require(p, "area_mm2", source), source);
      row.pareto = detail::require(p, "pareto", source).get<bool>();
      row.best_edp = detail::require(p, "best_edp", source).get<bool>();
      row.impr_edp_vs_baseline_pct =
          detail::as_double(detail::require(p, "impr_edp_vs_baseline_pct", source), source);
      row.area_gain_vs_baseline =
          detail::as_double(detail::require(p, "area_gain_vs_baseline", source), source);
      wr.rows.push_back(std::move(row));
    }
    report.workloads.push_back(std::move(wr));
  }
  if (auto it = doc.find("best_edp_tally"); it != doc.end()) {
    for (auto t = it->begin(); t != it->end(); ++t) {
      report.best_edp_tally[t.key()] = t.value().get<std::uint32_t>();
    }
  }
  return report;
}

/// Per-workload plot data: every point, the Pareto polyline, the ideal point
/// and the iso-EDP curves at the best and ideal EDP values.
inline std::string plot_csv_for_workload(const WorkloadReport& wr,
                                         const RunManifest* manifest = nullptr) {
  std::string out;
  if (manifest != nullptr) out += manifest->csv_comment();
  out += "series,config,delay_s,energy_j,edp_js\n";
  auto emit = [&](const std::string& series, const std::string& config, double d, double e) {
    out += series + ',' + config + ',' + format_double(d) + ',' + format_double(e) + ',' +
           format_double(d * e) + '\n';
  };
  double d_min = 0.0;
  double d_max = 0.0;
  std::vector<TradePoint> points;
  for (const auto& row : wr.rows) {
    emit("point", row.config, row.delay_s, row.energy_j);
    points.push_back(row.point());
    if (points.size() == 1 || row.delay_s < d_min) d_min = row.delay_s;
    if (points.size() == 1 || row.delay_s > d_max) d_max = row.delay_s;
  }
  for (const auto& p : pareto_front(points)) {
    emit("pareto", p.config, p.delay_s, p.energy_j);
  }
  if (wr.ideal.has_value()) {
    emit("ideal", "delay=" + wr.ideal->delay_config + " energy=" + wr.ideal->energy_config,
         wr.ideal->delay_s, wr.ideal->energy_j);
  }
  if (d_min < d_max) {
    for (const auto& [d, e] : iso_edp_samples(wr.best_edp_js, d_min, d_max, kIsoSampleCount)) {
      emit("iso_best", "", d, e);
    }
    if (wr.ideal.has_value()) {
      for (const auto& [d, e] :
           iso_edp_samples(wr.ideal->edp_js(), d_min, d_max, kIsoSampleCount)) {
        emit("iso_ideal", "", d, e);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DSE query files
// ---------------------------------------------------------------------------

inline DseQuery parse_query(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ValidationError(source + ": expected a JSON object");
  detail::check_keys(doc,
                     {"schema_version", "total_cores", "core_types", "min_per_type",
                      "max_per_type", "require_big", "heterogeneity_levels", "workloads",
                      "baseline", "mem_bandwidth_bps", "explicit_configs", "notes"},
                     source);
  detail::check_schema_version(doc, source);
  DseQuery q;
  if (auto it = doc.find("total_cores"); it != doc.end()) {
    q.total_cores = static_cast<std::uint32_t>(detail::as_uint(*it, source + ".total_cores"));
  }
  if (auto it = doc.find("core_types"); it != doc.end()) {
    for (const json& t : *it) q.core_types.push_back(t.get<std::string>());
  }
  if (auto it = doc.find("min_per_type"); it != doc.end()) {
    for (auto m = it->begin(); m != it->end(); ++m) {
      q.min_per_type[m.key()] = static_cast<std::uint32_t>(detail::as_uint(m.value(), source));
    }
  }
  if (auto it = doc.find("max_per_type"); it != doc.end()) {
    for (auto m = it->begin(); m != it->end(); ++m) {
      q.max_per_type[m.key()] = static_cast<std::uint32_t>(detail::as_uint(m.value(), source));
    }
  }
  if (auto it = doc.find("require_big"); it != doc.end()) q.require_big = it->get<bool>();
  if (auto it = doc.find("heterogeneity_levels"); it != doc.end()) {
    for (const json& l : *it) {
      q.heterogeneity_levels.insert(static_cast<std::uint32_t>(detail::as_uint(l, source)));
    }
  }
  if (auto it = doc.find("workloads"); it != doc.end()) {
    for (const json& w : *it) q.workloads.push_back(w.get<std::string>());
  }
  if (auto it = doc.find("baseline"); it != doc.end()) {
    q.baseline_config = detail::as_string(*it, source + ".baseline");
  }
  if (auto it = doc.find("mem_bandwidth_bps"); it != doc.end()) {
    q.mem_bandwidth_bps = detail::as_double(*it, source + ".mem_bandwidth_bps");
  }
  if (auto it = doc.find("explicit_configs"); it != doc.end()) {
    for (const json& c : *it) q.explicit_configs.push_back(c.get<std::string>());
  }
  return q;
}

inline DseQuery load_query(const std::filesystem::path& path) {
  return parse_query(detail::read_json_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Lints
// ---------------------------------------------------------------------------

/// Power-ordering lint: a core type that is faster on an IntAlu-only mix is
/// expected to draw at least as much busy power (static + dynamic).
inline std::vector<Diagnostic> lint_cores(const CoreRegistry& registry, const std::string& file) {
  std::vector<Diagnostic> diags;
  const InstructionMix alu = InstructionMix::single(InstructionClass::IntAlu);
  const auto& types = registry.types();
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (std::size_t j = 0; j < types.size(); ++j) {
      if (i == j) continue;
      const bool faster = throughput(types[i], alu) > throughput(types[j], alu);
      const double busy_i = types[i].static_power_w + types[i].dynamic_power_w;
      const double busy_j = types[j].static_power_w + types[j].dynamic_power_w;
      if (faster && busy_i < busy_j) {
        diags.push_back(Diagnostic{Severity::Warning, file,
                                   "power ordering: '" + types[i].name + "' is faster than '" +
                                       types[j].name + "' but draws less busy power"});
      }
    }
  }
  const CoreTypeSpec* a9 = registry.find("A9");
  if (a9 != nullptr && registry.find("A7") != nullptr && registry.find("A15") != nullptr) {
    diags.push_back(Diagnostic{
        Severity::Note, file,
        "A9 area " + format_double(a9->area_mm2) +
            " mm2 is a calibration compromise; the reference silicon-gain ratios are mutually "
            "inconsistent and no single A9 area satisfies all of them"});
  }
  return diags;
}

inline std::vector<Diagnostic> lint_system(const SystemConfig& cfg, const CoreRegistry& registry,
                                           const std::string& file) {
  std::vector<Diagnostic> diags;
  const std::string canonical = canonical_config_name(cfg.slots, registry);
  if (cfg.name != canonical) {
    diags.push_back(Diagnostic{Severity::Warning, file,
                               "config name '" + cfg.name + "' is not canonical (expected '" +
                                   canonical + "')"});
  }
  if (cfg.enabled_cores() == 0) {
    diags.push_back(Diagnostic{Severity::Warning, file, "no enabled cores"});
  }
  return diags;
}

}  // namespace hetsim
