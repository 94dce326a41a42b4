#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "helpers.hpp"
#include "hetsim/engine.hpp"

using namespace hetsim;
using namespace hetsim::test;

namespace {

// Independent self-scheduling oracle: replays the dispatch queue one event
// at a time with an ordered set of (next-free time, core index) pairs.
struct OracleResult {
  std::vector<std::uint32_t> core_of_chunk;
  double makespan;
};

OracleResult oracle_schedule(const std::vector<std::vector<double>>& durations, double start) {
  const std::size_t n_cores = durations.front().size();
  std::set<std::pair<double, std::size_t>> queue;
  for (std::size_t i = 0; i < n_cores; ++i) queue.insert({start, i});
  OracleResult out;
  out.makespan = start;
  for (const auto& chunk : durations) {
    auto [free_at, core] = *queue.begin();
    queue.erase(queue.begin());
    const double end = free_at + chunk[core];
    queue.insert({end, core});
    out.core_of_chunk.push_back(static_cast<std::uint32_t>(core));
    if (end > out.makespan) out.makespan = end;
  }
  return out;
}

CoreRegistry two_speed_registry() {
  CoreRegistry r;
  CoreTypeSpec fast = unit_core("fast", 2e9, 1.0);
  CoreTypeSpec slow = unit_core("slow", 1e9, 1.0);
  r.add(fast);
  r.add(slow);
  return r;
}

}  // namespace

TEST_CASE("a serial-only workload runs at instructions x cpi / frequency") {
  CoreRegistry r;
  r.add(unit_core("A15", 1e9, 1.0));
  const SystemConfig cfg = make_config({{"A15", 1}}, r);
  const WorkloadProfile w = simple_profile("s", {serial_phase(1'000'000'000, alu_mix())});
  const SimResult res = simulate(w, cfg, r);
  CHECK(res.delay_s == 1.0);
  CHECK(res.per_core[0].busy_s == 1.0);
  CHECK(res.per_core[0].instructions_executed == 1'000'000'000u);
}

TEST_CASE("four equal chunks on two identical cores balance perfectly") {
  CoreRegistry r;
  r.add(unit_core("C", 1e9, 1.0));
  const SystemConfig cfg = make_config({{"C", 2}}, r);
  const WorkloadProfile w = simple_profile("p", {parallel_phase(4'000'000'000, 4, alu_mix())});
  const SimResult res = simulate(w, cfg, r);
  CHECK(res.delay_s == 2.0);  // two 1 s chunks per core
}

TEST_CASE("three chunks across a fast and a slow core interleave as self-scheduled") {
  // Chunks of 2e9 IntAlu instructions: 1 s on the 2 GHz core, 2 s on the
  // 1 GHz core. Expected trace: fast takes chunks 0 and 2, slow takes 1,
  // both finish at 2.0 s.
  const CoreRegistry r = two_speed_registry();
  const SystemConfig cfg = make_config({{"fast", 1}, {"slow", 1}}, r);
  const WorkloadProfile w = simple_profile("p", {parallel_phase(6'000'000'000, 3, alu_mix())});
  SimOptions opt;
  opt.record_trace = true;
  const SimResult res = simulate(w, cfg, r, opt);
  CHECK(res.delay_s == 2.0);
  REQUIRE(res.trace.size() == 3);
  CHECK(res.trace[0].core_id == 0);
  CHECK(res.trace[1].core_id == 1);
  CHECK(res.trace[2].core_id == 0);
  CHECK(res.trace[2].start_s == 1.0);
  CHECK(res.trace[2].end_s == 2.0);
  CHECK(res.trace[1].end_s == 2.0);
}

TEST_CASE("one chunk on three cores lands on the lowest index") {
  const auto sched =
      schedule_parallel(1, 3, [](std::size_t, std::size_t) { return 1.5; });
  CHECK(sched.core_of_chunk[0] == 0);
  CHECK(sched.makespan_s == 1.5);
  CHECK(sched.core_busy_s[1] == 0.0);
  CHECK(sched.core_busy_s[2] == 0.0);
}

TEST_CASE("eight equal chunks on eight identical cores take one chunk time") {
  const auto sched = schedule_parallel(8, 8, [](std::size_t, std::size_t) { return 0.125; });
  CHECK(sched.makespan_s == 0.125);
}

TEST_CASE("schedule_parallel matches the event-replay oracle") {
  SECTION("duration-ratio grid, up to 3 cores and 6 chunks") {
    const double ratios[] = {0.5, 1.0, 2.0, 4.0};
    for (std::size_t n_cores = 1; n_cores <= 3; ++n_cores) {
      std::vector<std::size_t> idx(n_cores, 0);
      while (true) {
        std::vector<double> per_core(n_cores);
        for (std::size_t i = 0; i < n_cores; ++i) per_core[i] = ratios[idx[i]];
        for (std::size_t n_chunks = 1; n_chunks <= 6; ++n_chunks) {
          std::vector<std::vector<double>> durations(n_chunks, per_core);
          const auto sched = schedule_parallel(
              n_chunks, n_cores, [&](std::size_t c, std::size_t k) { return durations[c][k]; });
          const auto expect = oracle_schedule(durations, 0.0);
          CHECK(sched.makespan_s == expect.makespan);
          CHECK(sched.core_of_chunk == expect.core_of_chunk);
        }
        std::size_t d = 0;
        while (d < n_cores && ++idx[d] == 4) idx[d++] = 0;
        if (d == n_cores) break;
      }
    }
  }

  SECTION("arbitrary per-chunk durations") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dist(0.1, 4.0);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n_cores = 1 + rng() % 3;
      const std::size_t n_chunks = 1 + rng() % 6;
      std::vector<std::vector<double>> durations(n_chunks, std::vector<double>(n_cores));
      for (auto& row : durations) {
        for (double& d : row) d = dist(rng);
      }
      const auto sched = schedule_parallel(
          n_chunks, n_cores, [&](std::size_t c, std::size_t k) { return durations[c][k]; });
      const auto expect = oracle_schedule(durations, 0.0);
      CHECK(sched.makespan_s == expect.makespan);
      CHECK(sched.core_of_chunk == expect.core_of_chunk);
    }
  }
}

TEST_CASE("contention stretch kicks in only above the cap") {
  CoreTypeSpec c = unit_core("M", 1e9, 1.0);
  c.bytes_per_mem_instr = 4.0;
  // Each core moves 1e9 instr/s x 1.0 mem fraction x 4 B = 4 GB/s.
  const std::vector<const CoreTypeSpec*> two = {&c, &c};
  const std::vector<double> cpis = {1.0, 1.0};
  const double demand = aggregate_mem_demand_bps(two, cpis, 1.0);
  CHECK(demand == 8e9);
  CHECK(contention_stretch(demand, 16e9) == 1.0);

  CoreTypeSpec h = unit_core("H", 1e9, 1.0);
  h.bytes_per_mem_instr = 8.0;  // 8 GB/s per core
  const std::vector<const CoreTypeSpec*> hot = {&h, &h};
  const double hot_demand = aggregate_mem_demand_bps(hot, cpis, 1.0);
  CHECK(contention_stretch(hot_demand, 8e9) == 2.0);
  CHECK_THROWS_AS(contention_stretch(1.0, 0.0), ValidationError);
}

TEST_CASE("a binding cap stretches parallel time and the result reports it") {
  CoreRegistry r;
  CoreTypeSpec c = unit_core("M", 1e9, 1.0);
  c.bytes_per_mem_instr = 8.0;
  r.add(c);
  InstructionMix mem = InstructionMix::single(InstructionClass::MemRead);
  WorkloadProfile w = simple_profile("m", {parallel_phase(1'000'000'000, 10, mem)});

  SystemConfig open = make_config({{"M", 2}}, r, 1e12);
  SystemConfig tight = make_config({{"M", 2}}, r, 8e9);  // demand is 16 GB/s
  const SimResult fast = simulate(w, open, r);
  const SimResult slow = simulate(w, tight, r);
  CHECK(fast.contention[0].stretch == 1.0);
  CHECK(slow.contention[0].stretch == 2.0);
  CHECK(slow.contention[0].consumed_bps == 8e9);
  CHECK(slow.delay_s == 2.0 * fast.delay_s);
}

TEST_CASE("energy integrates static over delay and dynamic over busy") {
  CoreTypeSpec c = unit_core("E");
  c.static_power_w = 0.1;
  c.dynamic_power_w = 0.9;
  const std::vector<const CoreTypeSpec*> cores = {&c};
  CHECK(energy_of({2.0}, 3.0, cores) == 0.1 * 3.0 + 0.9 * 2.0);  // 2.1 J
}

TEST_CASE("a zero-length workload consumes zero energy") {
  CoreRegistry r;
  r.add(unit_core("A", 1e9, 1.0));
  r.add(unit_core("B", 1e9, 1.0));
  SystemConfig cfg;
  cfg.slots = {ConfigSlot{"A", 1, 0}, ConfigSlot{"B", 7, 7}};  // everything but one core gated
  cfg.name = "test";
  const WorkloadProfile w = simple_profile("z", {sync_phase(0.0)});
  const SimResult res = simulate(w, cfg, r);
  CHECK(res.delay_s == 0.0);
  CHECK(res.energy_j == 0.0);
  CHECK(res.per_core.size() == 1);  // disabled cores do not appear
}

TEST_CASE("doubling dynamic power doubles the dynamic energy share") {
  CoreRegistry r;
  r.add(unit_core("A", 1e9, 1.0));
  const SystemConfig cfg = make_config({{"A", 2}}, r);
  const WorkloadProfile w = simple_profile(
      "d", {serial_phase(500'000'000, alu_mix()), parallel_phase(1'000'000'000, 8, alu_mix())});
  const SimResult base = simulate(w, cfg, r);

  CoreRegistry doubled;
  CoreTypeSpec d = unit_core("A", 1e9, 1.0);
  d.dynamic_power_w *= 2.0;
  doubled.add(d);
  const SimResult hot = simulate(w, cfg, doubled);
  const double static_term = 2 * d.static_power_w * base.delay_s;
  CHECK(hot.delay_s == base.delay_s);
  CHECK_THAT(hot.energy_j - static_term,
             Catch::Matchers::WithinRel(2.0 * (base.energy_j - static_term), 1e-12));
}

TEST_CASE("simulation results are deterministic") {
  const CoreRegistry cores = shipped_cores();
  const WorkloadProfile w = shipped_profile("kmeans", cores);
  const SystemConfig cfg = make_config({{"A7", 2}, {"A9", 5}, {"A15", 1}}, cores);
  const SimResult a = simulate(w, cfg, cores);
  const SimResult b = simulate(w, cfg, cores);
  CHECK(a.delay_s == b.delay_s);
  CHECK(a.energy_j == b.energy_j);
  CHECK(a.edp_js == b.edp_js);
  for (std::size_t i = 0; i < a.per_core.size(); ++i) {
    CHECK(a.per_core[i].busy_s == b.per_core[i].busy_s);
    CHECK(a.per_core[i].instructions_executed == b.per_core[i].instructions_executed);
  }
}

TEST_CASE("simulate rejects empty systems and unknown types") {
  const CoreRegistry cores = shipped_cores();
  const WorkloadProfile w = shipped_profile("nn", cores);

  SystemConfig gated;
  gated.name = "gated";
  gated.slots = {ConfigSlot{"A7", 4, 4}};
  CHECK_THROWS_WITH(simulate(w, gated, cores),
                    Catch::Matchers::ContainsSubstring("no enabled cores"));

  SystemConfig unknown;
  unknown.name = "u";
  unknown.slots = {ConfigSlot{"A53", 8, 0}};
  CHECK_THROWS_AS(simulate(w, unknown, cores), SimulationError);
}

TEST_CASE("invariants hold across shipped workloads and mixed configs") {
  const CoreRegistry cores = shipped_cores();
  const std::vector<std::vector<std::pair<std::string, std::uint32_t>>> configs = {
      {{"A7", 8}}, {{"A9", 8}}, {{"A15", 8}},
      {{"A7", 4}, {"A15", 4}}, {{"A7", 2}, {"A9", 5}, {"A15", 1}},
      {{"A7", 1}, {"A9", 1}, {"A15", 6}}};
  SimOptions opt;
  opt.record_trace = true;
  for (const auto& p : shipped_profiles(cores)) {
    for (const auto& counts : configs) {
      const SystemConfig cfg = make_config(counts, cores);
      const SimResult res = simulate(p, cfg, cores, opt);
      INFO(p.name << " on " << cfg.name);

      // edp identity, bitwise
      CHECK(res.edp_js == res.energy_j * res.delay_s);

      // instruction conservation
      std::uint64_t done = 0;
      for (const auto& c : res.per_core) done += c.instructions_executed;
      CHECK(done == p.total_instructions());

      // Amdahl floor: the serial phases alone lower-bound the delay
      const auto& main_type = cores.at(res.per_core[res.main_core_id].core_type);
      double serial_s = 0.0;
      double sync_s = 0.0;
      double slowest_chunks_s = 0.0;
      double total_throughput = 0.0;
      for (const auto& c : res.per_core) {
        const auto& t = cores.at(c.core_type);
        total_throughput += t.frequency_hz / *p.override_for(t.name);
      }
      double parallel_work_instr = 0.0;
      for (const auto& ph : p.phases) {
        if (ph.kind == PhaseKind::Serial) {
          serial_s += double(ph.instructions) * *p.override_for(main_type.name) /
                      main_type.frequency_hz;
        } else if (ph.kind == PhaseKind::Sync) {
          sync_s += ph.sync_duration_s;
        } else {
          parallel_work_instr += double(ph.instructions);
          double slowest = 0.0;
          for (const auto& c : res.per_core) {
            const auto& t = cores.at(c.core_type);
            slowest = std::max(slowest, *p.override_for(t.name) / t.frequency_hz);
          }
          slowest_chunks_s += double(ph.instructions) * slowest;
        }
      }
      CHECK(res.delay_s >= serial_s);
      CHECK(res.delay_s >= serial_s + parallel_work_instr / total_throughput);
      CHECK(res.delay_s <= serial_s + slowest_chunks_s + sync_s + 1e-9);

      // busy + idle == delay for every core
      for (const auto& c : res.per_core) {
        CHECK_THAT(c.busy_s + c.idle_s, Catch::Matchers::WithinRel(res.delay_s, 1e-12));
      }

      // work conservation: chunks on one core are back to back, and every
      // core that received work starts at the phase start
      std::size_t cursor = 0;
      for (std::size_t pi = 0; pi < p.phases.size(); ++pi) {
        if (p.phases[pi].kind != PhaseKind::Parallel) continue;
        const double phase_start = (pi == 0) ? 0.0 : res.phase_end_s[pi - 1];
        const std::size_t count = p.phases[pi].chunk_count;
        std::vector<double> last_end(res.per_core.size(), phase_start);
        std::vector<bool> seen(res.per_core.size(), false);
        for (std::size_t k = cursor; k < cursor + count; ++k) {
          const TraceEntry& e = res.trace[k];
          CHECK(e.start_s == last_end[e.core_id]);
          if (!seen[e.core_id]) {
            CHECK(e.start_s == phase_start);
            seen[e.core_id] = true;
          }
          last_end[e.core_id] = e.end_s;
        }
        cursor += count;
      }
    }
  }
}

TEST_CASE("adding a core never hurts with equal chunks at shipped speed ratios") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dur(0.5, 4.5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    std::vector<double> per_core(n);
    for (double& d : per_core) d = dur(rng);
    auto makespan = [&](const std::vector<double>& cores) {
      return schedule_parallel(512, cores.size(),
                               [&](std::size_t, std::size_t k) { return cores[k]; })
          .makespan_s;
    };
    const double before = makespan(per_core);
    std::vector<double> grown = per_core;
    grown.push_back(dur(rng));
    CHECK(makespan(grown) <= before * (1.0 + 1e-12));
  }
}

TEST_CASE("energy decomposes additively over phases") {
  const CoreRegistry cores = shipped_cores();
  const WorkloadProfile w = shipped_profile("srad_v1", cores);
  const SystemConfig cfg = make_config({{"A7", 6}, {"A9", 1}, {"A15", 1}}, cores);
  SimOptions opt;
  opt.record_trace = true;
  const SimResult res = simulate(w, cfg, cores, opt);

  // Rebuild per-phase busy spans from the trace and the phase table.
  std::vector<double> phase_energy(w.phases.size(), 0.0);
  std::vector<const CoreTypeSpec*> types;
  for (const auto& c : res.per_core) types.push_back(&cores.at(c.core_type));
  std::size_t cursor = 0;
  for (std::size_t pi = 0; pi < w.phases.size(); ++pi) {
    const double start = (pi == 0) ? 0.0 : res.phase_end_s[pi - 1];
    const double span = res.phase_end_s[pi] - start;
    std::vector<double> busy(res.per_core.size(), 0.0);
    if (w.phases[pi].kind == PhaseKind::Serial) {
      busy[res.main_core_id] = span;
    } else if (w.phases[pi].kind == PhaseKind::Parallel) {
      for (std::size_t k = 0; k < w.phases[pi].chunk_count; ++k) {
        const TraceEntry& e = res.trace[cursor + k];
        busy[e.core_id] += e.end_s - e.start_s;
      }
      cursor += w.phases[pi].chunk_count;
    }
    for (std::size_t i = 0; i < types.size(); ++i) {
      phase_energy[pi] += types[i]->static_power_w * span + types[i]->dynamic_power_w * busy[i];
    }
  }
  double sum = 0.0;
  for (double e : phase_energy) sum += e;
  CHECK_THAT(sum, Catch::Matchers::WithinRel(res.energy_j, 1e-9));
}

TEST_CASE("the main core is the fastest enabled core for the profile") {
  const CoreRegistry cores = shipped_cores();
  const WorkloadProfile w = shipped_profile("lud", cores);

  const SimResult with_big = simulate(w, make_config({{"A7", 7}, {"A15", 1}}, cores), cores);
  CHECK(with_big.per_core[with_big.main_core_id].core_type == "A15");

  const SimResult no_big = simulate(w, make_config({{"A7", 7}, {"A9", 1}}, cores), cores);
  CHECK(no_big.per_core[no_big.main_core_id].core_type == "A9");
}

TEST_CASE("canonical names order types by single-core capability") {
  const CoreRegistry cores = shipped_cores();
  CHECK(canonical_config_name({{"A15", 4, 0}, {"A7", 4, 0}}, cores) == "4A7+4A15");
  CHECK(canonical_config_name({{"A9", 0, 0}, {"A15", 8, 0}}, cores) == "8A15");
  CHECK(canonical_config_name({{"A15", 1, 0}, {"A9", 5, 0}, {"A7", 2, 0}}, cores) ==
        "2A7+5A9+1A15");

  const auto slots = parse_config_name("2A7+5A9+1A15", cores);
  REQUIRE(slots.size() == 3);
  CHECK(slots[0].type == "A7");
  CHECK(slots[0].count == 2);
  CHECK(slots[2].count == 1);
  CHECK_THROWS_AS(parse_config_name("A7+4A15", cores), ValidationError);
  CHECK_THROWS_AS(parse_config_name("4A7+4A99", cores), ValidationError);
}

TEST_CASE("sync-idle dynamic fraction is a documented knob, default off") {
  CoreRegistry r;
  r.add(unit_core("A", 1e9, 1.0));
  const SystemConfig cfg = make_config({{"A", 2}}, r);
  const WorkloadProfile w = simple_profile("y", {sync_phase(1.0)});
  const SimResult cold = simulate(w, cfg, r);
  CHECK(cold.energy_j == 2 * 0.1 * 1.0);  // static only

  SimOptions opt;
  opt.idle_dynamic_fraction = 0.5;
  const SimResult warm = simulate(w, cfg, r, opt);
  CHECK_THAT(warm.energy_j, Catch::Matchers::WithinRel(0.2 + 2 * 0.5 * 1.0 * 1.0, 1e-12));
}
