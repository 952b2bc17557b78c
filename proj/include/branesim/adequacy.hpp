// ============================================================================
// adequacy.hpp — property checks tying the machine to the reference semantics
// ============================================================================
//
// For a generated system P, every live reaction of the encoded machine is
// force-fired once from a fresh copy of the initial state, and the decoded
// successor is compared against the reference rate table:
//
//   soundness     — each transition's propensity equals the reference rate
//                   of its decoded successor class
//   progress      — every one-step reduction class is hit by some transition
//   completeness  — every positive-rate successor class is hit (with the
//                   right rate, via soundness)
//
// A separate self-consistency check compares the support of the reference
// id rows with the structural one-step enumeration.
//
// Failures shrink greedily (drop a cell, cut a count, gut a membrane or a
// content) to a small reproducer.
//
// ============================================================================

#pragma once

#include "branesim/machine.hpp"
#include "branesim/measure.hpp"
#include "branesim/reduce.hpp"

#include <functional>
#include <optional>
#include <string>

namespace brane::adequacy {

struct GeneratorConfig {
    int max_depth = 3;      // cell nesting
    int max_width = 3;      // cells per level
    int alphabet = 3;       // channel names "a", "b", ...
    int max_count = 3;      // sibling multiplicities
};

// Deterministic in the generator state; guaranteed to contain at least one
// action.
SystemPtr generate_system(sim::Rng& rng, const GeneratorConfig& cfg);

// Random positive rates (integers and small decimals) for the alphabet.
RateTable generate_rates(sim::Rng& rng, const GeneratorConfig& cfg);

struct CheckOptions {
    // Exact mode compares rationals; float mode compares the machine's
    // double propensities within a relative tolerance.
    bool float_mode = false;
    double rel_tol = 1e-9;
};

struct Counterexample {
    SystemPtr system;
    std::string detail;
};

// Soundness + progress + completeness for one system; nullopt when all hold.
std::optional<Counterexample> check_adequacy(const SystemPtr& P, const RateTable& rates,
                                             const CheckOptions& options = {});

// Reference self-consistency: support of the id rows equals the structural
// one-step enumeration.
std::optional<Counterexample> check_oracle_consistency(const SystemPtr& P,
                                                       const RateTable& rates);

// Greedy minimization: repeatedly applies the first simplification that
// still fails the predicate.
SystemPtr shrink(const SystemPtr& failing,
                 const std::function<bool(const SystemPtr&)>& still_fails);

struct SuiteResult {
    std::size_t cases = 0;
    std::optional<Counterexample> failure;  // already shrunk
};

// Runs `cases` generated systems through check_adequacy (and the oracle
// self-consistency check); cases run concurrently.
SuiteResult run_suite(std::uint64_t seed, std::size_t cases, const GeneratorConfig& cfg,
                      const CheckOptions& options = {});

}  // namespace brane::adequacy
