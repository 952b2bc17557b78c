#include "branesim/simulate.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>
#include <vector>

namespace brane::sim {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_compartment(CompartmentId id) {
    if (id == kRoot) return "root";
    return "c" + std::to_string(id);
}

namespace {

double next_event_time(const Machine& M) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [O, act] : M.reactions) {
        (void)O;
        if (act.time < best) best = act.time;
    }
    return best;
}

void append_census(std::string& rows, std::uint64_t run, const Machine& M) {
    for (const auto& [I, count] : M.species) {
        if (count == 0) continue;
        rows += std::to_string(run);
        rows += ',';
        rows += format_double(M.now);
        rows += ',';
        rows += format_compartment(I.outer);
        rows += ',';
        rows += to_string(I.complex);
        rows += ',';
        rows += count.str();
        rows += '\n';
    }
}

void run_loop(Machine& M, const RunConfig& config, RunResult& result,
              std::uint64_t run_number) {
    for (;;) {
        if (config.max_steps && result.steps >= *config.max_steps) break;
        double next = next_event_time(M);
        if (!std::isfinite(next)) {
            result.deadlocked = true;
            break;
        }
        if (config.max_time && next > *config.max_time) {
            M.now = *config.max_time;
            break;
        }
        std::optional<StepOutcome> fired = step(M, config.normalize);
        if (!fired) {
            result.deadlocked = true;
            break;
        }
        ++result.steps;
        if (config.want_trace) {
            result.trace_rows += std::to_string(run_number);
            result.trace_rows += ',';
            result.trace_rows += std::to_string(result.steps);
            result.trace_rows += ',';
            result.trace_rows += format_double(fired->time);
            result.trace_rows += ',';
            result.trace_rows += to_keyword(fired->kind);
            result.trace_rows += ',';
            result.trace_rows += fired->channel;
            result.trace_rows += ',';
            result.trace_rows += format_double(fired->propensity);
            result.trace_rows += '\n';
        }
        if (config.want_census && result.steps % config.census_every == 0)
            append_census(result.census_rows, run_number, M);
    }
}

}  // namespace

RunResult simulate_run(const SystemPtr& P, const RateTable& rates, const RunConfig& config,
                       std::uint64_t run_number) {
    RunResult result;
    result.run = run_number;
    Machine M = machine_init(P, rates, split_seed(config.seed, run_number));
    if (config.want_census) append_census(result.census_rows, run_number, M);
    try {
        run_loop(M, config, result, run_number);
    } catch (const MachineError& e) {
        // Attach the state for the caller's diagnostics.
        throw MachineError(std::string(e.what()) + "\n" + dump_state(M));
    }
    result.final_time = M.now;
    return result;
}

std::vector<RunResult> run_simulation(const SystemPtr& P, const RateTable& rates,
                                      const RunConfig& config, std::ostream* trace,
                                      std::ostream* census) {
    std::vector<RunResult> results(config.runs);
    std::vector<std::exception_ptr> errors(config.runs);
    std::atomic<std::uint64_t> cursor{0};
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, std::max<std::uint64_t>(1, config.runs)));
    auto work = [&] {
        for (;;) {
            std::uint64_t i = cursor.fetch_add(1);
            if (i >= config.runs) return;
            try {
                results[i] = simulate_run(P, rates, config, i + 1);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1 || config.runs <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    if (trace) {
        *trace << kTraceHeader << '\n';
        for (const RunResult& r : results) *trace << r.trace_rows;
    }
    if (census) {
        *census << kCensusHeader << '\n';
        for (const RunResult& r : results) *census << r.census_rows;
    }
    return results;
}

}  // namespace brane::sim
