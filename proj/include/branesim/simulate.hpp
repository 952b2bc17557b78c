// ============================================================================
// simulate.hpp — seeded multi-run simulation with trace/census output
// ============================================================================
//
// Each run gets an independent generator seeded by mixing the master seed
// with the run number, so runs can execute on worker threads while outputs
// are assembled in run order. Trace rows record each fired reaction; census
// rows snapshot the machine's own species view (compartment, complex,
// count), making copy-on-write behavior observable.
//
// ============================================================================

#pragma once

#include "branesim/machine.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace brane::sim {

struct RunConfig {
    std::uint64_t seed = 0;
    std::uint64_t runs = 1;
    std::optional<double> max_time;
    std::optional<std::uint64_t> max_steps;
    bool normalize = false;
    std::uint64_t census_every = 1;  // snapshot cadence in steps
    bool want_trace = false;
    bool want_census = false;
};

inline constexpr const char* kTraceHeader = "run,step,time,kind,name,propensity";
inline constexpr const char* kCensusHeader = "run,time,outer,complex,count";

struct RunResult {
    std::uint64_t run = 0;         // 1-based run number
    std::uint64_t steps = 0;
    double final_time = 0;
    bool deadlocked = false;
    std::string trace_rows;        // CSV rows, no header
    std::string census_rows;
};

// Executes one run (deterministic in (P, rates, config, run number)).
RunResult simulate_run(const SystemPtr& P, const RateTable& rates, const RunConfig& config,
                       std::uint64_t run_number);

// Executes config.runs runs concurrently and writes ordered CSV streams
// (headers included) to the given sinks when present.
std::vector<RunResult> run_simulation(const SystemPtr& P, const RateTable& rates,
                                      const RunConfig& config, std::ostream* trace,
                                      std::ostream* census);

// Formatting helpers shared with tests: full-precision shortest-round-trip
// style ("%.17g") and compartment names ("root" or "c<id>").
std::string format_double(double x);
std::string format_compartment(CompartmentId id);

}  // namespace brane::sim
