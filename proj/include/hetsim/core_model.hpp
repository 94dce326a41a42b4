#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetsim/error.hpp"

namespace hetsim {

// ---------------------------------------------------------------------------
// Instruction classes and mixes
// ---------------------------------------------------------------------------

enum class InstructionClass : unsigned { IntAlu = 0, SimdFloat, MemRead, MemWrite, Other };

inline constexpr std::size_t kInstructionClassCount = 5;

inline constexpr std::array<const char*, kInstructionClassCount> kInstructionClassNames = {
    "IntAlu", "SimdFloat", "MemRead", "MemWrite", "Other"};

inline const char* to_string(InstructionClass c) {
  return kInstructionClassNames[static_cast<std::size_t>(c)];
}

inline std::optional<InstructionClass> instruction_class_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
    if (s == kInstructionClassNames[i]) return static_cast<InstructionClass>(i);
  }
  return std::nullopt;
}

/// Fraction of dynamic instructions per class. Valid mixes are non-negative
/// and sum to 1 within 1e-9 (the loader renormalizes small drifts).
struct InstructionMix {
  std::array<double, kInstructionClassCount> fractions{};

  double& operator[](InstructionClass c) { return fractions[static_cast<std::size_t>(c)]; }
  double operator[](InstructionClass c) const { return fractions[static_cast<std::size_t>(c)]; }

  double sum() const {
    double s = 0.0;
    for (double f : fractions) s += f;
    return s;
  }

  /// Share of instructions that touch memory (MemRead + MemWrite).
  double mem_fraction() const {
    return (*this)[InstructionClass::MemRead] + (*this)[InstructionClass::MemWrite];
  }

  /// Mix concentrated on a single class; handy in tests and presets.
  static InstructionMix single(InstructionClass c) {
    InstructionMix m;
    m[c] = 1.0;
    return m;
  }

  void validate(double tolerance = 1e-9) const {
    for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
      if (fractions[i] < 0.0 || fractions[i] > 1.0 || !std::isfinite(fractions[i])) {
        throw ValidationError(std::string("instruction mix fraction for ") +
                              kInstructionClassNames[i] + " is outside [0,1]");
      }
    }
    if (std::abs(sum() - 1.0) > tolerance) {
      throw ValidationError("instruction mix fractions sum to " + std::to_string(sum()) +
                            ", expected 1");
    }
  }

  bool operator==(const InstructionMix&) const = default;
};

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

/// Microarchitecture, power and area parameters of one core type.
/// Immutable after load; safe to share across concurrent simulations.
struct CoreTypeSpec {
  std::string name;
  double frequency_hz = 0.0;
  /// Cycles per instruction, indexed by InstructionClass.
  std::array<double, kInstructionClassCount> cpi{};
  /// Informational only; the performance effect of out-of-order execution
  /// is already encoded in the cpi table.
  bool out_of_order = false;
  /// Watts drawn above static while executing instructions.
  double dynamic_power_w = 0.0;
  /// Watts drawn whenever the core is enabled, busy or idle.
  double static_power_w = 0.0;
  double area_mm2 = 0.0;
  /// Average bytes of memory traffic per MemRead/MemWrite instruction.
  double bytes_per_mem_instr = 0.0;

  double cpi_for(InstructionClass c) const { return cpi[static_cast<std::size_t>(c)]; }

  void validate() const {
    if (name.empty()) throw ValidationError("core type has an empty name");
    auto positive = [&](double v, const char* field) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError("core type '" + name + "': " + field + " must be > 0");
      }
    };
    positive(frequency_hz, "frequency_hz");
    positive(static_power_w, "static_power_w");
    positive(area_mm2, "area_mm2");
    positive(bytes_per_mem_instr, "bytes_per_mem_instr");
    if (dynamic_power_w < 0.0 || !std::isfinite(dynamic_power_w)) {
      throw ValidationError("core type '" + name + "': dynamic_power_w must be >= 0");
    }
    for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
      if (!(cpi[i] > 0.0) || !std::isfinite(cpi[i])) {
        throw ValidationError("core type '" + name + "': cpi entry for " +
                              kInstructionClassNames[i] + " must be > 0");
      }
    }
  }

  bool operator==(const CoreTypeSpec&) const = default;
};

/// Named core types in declaration order. Declaration order is the
/// deterministic tie-breaker everywhere a choice between types is needed.
class CoreRegistry {
 public:
  void add(CoreTypeSpec spec) {
    spec.validate();
    if (find(spec.name) != nullptr) {
      throw ValidationError("duplicate core type '" + spec.name + "'");
    }
    types_.push_back(std::move(spec));
  }

  const CoreTypeSpec* find(std::string_view name) const {
    for (const auto& t : types_) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }

  const CoreTypeSpec& at(std::string_view name) const {
    const CoreTypeSpec* t = find(name);
    if (t == nullptr) throw ValidationError("unknown core type '" + std::string(name) + "'");
    return *t;
  }

  const std::vector<CoreTypeSpec>& types() const { return types_; }
  std::size_t size() const { return types_.size(); }
  bool empty() const { return types_.empty(); }

 private:
  std::vector<CoreTypeSpec> types_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Mix-weighted cycles per instruction, or the measured per-workload value
/// when an override is supplied.
inline double effective_cpi(const CoreTypeSpec& spec, const InstructionMix& mix,
                            std::optional<double> override_cpi = std::nullopt) {
  if (override_cpi.has_value()) {
    if (!(*override_cpi > 0.0)) {
      throw ValidationError("core type '" + spec.name + "': cpi override must be > 0");
    }
    return *override_cpi;
  }
  mix.validate();
  double cpi = 0.0;
  for (std::size_t i = 0; i < kInstructionClassCount; ++i) {
    if (!(spec.cpi[i] > 0.0)) {
      throw ValidationError("core type '" + spec.name + "': missing cpi entry for " +
                            kInstructionClassNames[i]);
    }
    cpi += mix.fractions[i] * spec.cpi[i];
  }
  return cpi;
}

/// Instructions per second for the given mix.
inline double throughput(const CoreTypeSpec& spec, const InstructionMix& mix,
                         std::optional<double> override_cpi = std::nullopt) {
  return spec.frequency_hz / effective_cpi(spec, mix, override_cpi);
}

}  // namespace hetsim
