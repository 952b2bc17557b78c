// ============================================================================
// machine.hpp — population-based stochastic machine with copy-on-write
// ============================================================================
//
// State layout
// ------------
// A system is flattened into species: one entry per tree node, keyed by
// (outer compartment, inner compartment, complex), where the complex is the
// node's membrane as a canonical action multiset and the count is the node's
// multiplicity. Congruent siblings share one species, so a population of
// 10^4 identical cells is a single entry.
//
// Reactions are generated per species against the current state:
//   pino   — unary, consumes one instance, emits residual + vesicle
//   exo    — binary parent/child, fuses membranes, relocates the child's
//            content to the parent's outside (a compartment renaming)
//   phago  — binary siblings (or one species twice), nests the engulfed cell
//            inside a fresh vesicle under the engulfer
//
// Fresh compartment names inside stored products are placeholders resolved
// when the reaction fires, so reactions stay valid map keys across
// regeneration.
//
// Scheduling follows the next-reaction discipline: each reaction holds an
// absolute tentative firing time; when its propensity changes from a to a',
// the remaining wait rescales by a/a' (with a fresh draw when resurrecting
// from zero). The next event is the minimal (time, reaction) pair.
//
// Propensity of a reaction with reactant multiset {(I_k, j_k)}:
//
//     rate · ∏_k C(S(I_k), j_k) · ∏ S(K)  over K in the union of the
//     reactants' proper ancestor chains, excluding reactants themselves.
//
// The count of a shared ancestor multiplies once, matching the total rate
// over the redexes the grouped state denotes.
//
// Copy-on-write: before firing, each reactant's ancestor chain is split to
// multiplicity one (top-down) and the reactant itself is split to exactly
// the consumed multiplicity; splits deep-copy subtrees under fresh names
// and regenerate reactions for the copies.
//
// ============================================================================

#pragma once

#include "branesim/canonical.hpp"
#include "branesim/rates.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace brane::sim {

// ── names ───────────────────────────────────────────────────────────────────

using CompartmentId = std::uint64_t;
inline constexpr CompartmentId kRoot = 0;
// Placeholders used inside stored reaction products; never present in state.
inline constexpr CompartmentId kFreshName = ~0ull;        // vesicle compartment
inline constexpr CompartmentId kPartnerName = ~0ull - 1;  // separated self-pair partner

// ── species and reactions ───────────────────────────────────────────────────

struct Species {
    CompartmentId outer = kRoot;
    CompartmentId inner = kRoot;
    CanonMembranePtr complex;
};
int compare(const Species& a, const Species& b);
struct SpeciesLess {
    bool operator()(const Species& a, const Species& b) const { return compare(a, b) < 0; }
};
using SpeciesCounts = std::map<Species, Count, SpeciesLess>;

// Compartment renaming applied when a reaction fires ([from := to]).
struct Renaming {
    bool has = false;
    CompartmentId from = 0;
    CompartmentId to = 0;
};

struct Reaction {
    ActionKind kind = ActionKind::Pino;  // Pino, Exo or Phago
    Name channel;
    SpeciesCounts reactants;
    Rational rate;
    Renaming rename;
    SpeciesCounts products;
};
int compare(const Reaction& a, const Reaction& b);
struct ReactionLess {
    bool operator()(const Reaction& a, const Reaction& b) const {
        return compare(a, b) < 0;
    }
};

struct Activity {
    double time = std::numeric_limits<double>::infinity();  // absolute tentative time
    double propensity = 0;
};
using ReactionSchedule = std::map<Reaction, Activity, ReactionLess>;

struct MachineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ── randomness ──────────────────────────────────────────────────────────────

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    // Uniform on (0, 1] (never 0, so -log is finite).
    double uniform_unit();

  private:
    std::mt19937_64 gen_;
};

// Exponential waiting time; nonpositive propensity waits forever.
double exponential_delay(double propensity, double unit_draw);

// ── machine ─────────────────────────────────────────────────────────────────

struct Machine {
    double now = 0;
    SpeciesCounts species;
    ReactionSchedule reactions;
    CompartmentId next_name = 1;
    RateTable rates;
    Rng rng;

    explicit Machine(RateTable r, std::uint64_t seed) : rates(std::move(r)), rng(seed) {}
};

// Encodes a system rooted at kRoot and schedules its initial reactions.
Machine machine_init(const SystemPtr& P, const RateTable& rates, std::uint64_t seed);

// Back-translation of the populations under compartment `at`.
CanonSystemPtr decode(const SpeciesCounts& S, CompartmentId at = kRoot);

// Count of live species (used by performance assertions).
std::size_t live_species(const SpeciesCounts& S);

// Effective multiplicity: S(I) times the counts along I's ancestor chain.
// Throws MachineError on a malformed chain.
Count s_star(const SpeciesCounts& S, const Species& I);

Rational exact_propensity(const Reaction& O, const SpeciesCounts& S);
double propensity(const Reaction& O, const SpeciesCounts& S);

// All reactions in which I participates, against the current state.
std::vector<Reaction> reactions_for(const Species& I, const SpeciesCounts& S,
                                    const RateTable& rates);

// ── operations ──────────────────────────────────────────────────────────────

struct CowOutcome {
    // Reactants rewritten to the secured unit-multiplicity instances (a
    // self-pair becomes two distinct species).
    SpeciesCounts fire_reactants;
    // Inner name of the separated partner instance for self-pairs.
    CompartmentId partner_inner = 0;
};

// Splits every reactant's lineage so the reaction consumes private
// instances; regenerates reactions for the copies and refreshes all
// propensities. Leaves the machine consistent (and the decoding unchanged).
// O must be enabled: a scheduled reaction with positive propensity.
CowOutcome cow_reactants(Machine& M, const Reaction& O);

// Applies one occurrence of O at time `at` (cow, consume, produce, relocate,
// regenerate, reschedule, sweep). O must be a scheduled reaction.
void fire(Machine& M, const Reaction& O, double at, bool normalize_after = false);

struct StepOutcome {
    ActionKind kind = ActionKind::Pino;
    Name channel;
    double time = 0;
    double propensity = 0;
};

// Advances to the next scheduled reaction; std::nullopt on deadlock.
std::optional<StepOutcome> step(Machine& M, bool normalize_after = false);

// Merges congruent sibling subtrees (optional population compaction).
void normalize_machine(Machine& M);

// Structural invariants; throws MachineError with a description. Quadratic in
// the number of species — a diagnostic for tests, not for per-step use.
void verify_machine(const Machine& M);

// Renders species and schedule (diagnostics for invariant failures).
std::string dump_state(const Machine& M);

}  // namespace brane::sim
