// ============================================================================
// measure.hpp — reference stochastic semantics (exact, reference-counted terms)
// ============================================================================
//
// Computes, by structural recursion, the finite rate tables that the
// stochastic semantics assigns to membranes and systems. All arithmetic is
// exact rational; targets are canonical forms, so rates of congruent
// configurations accumulate on a single key.
//
// System-level table keys:
//   id        ⟨target⟩                      — completed internal step
//   ph<n>     ⟨engulfed-cell, siblings⟩     — an engulfable cell offer
//   ph'<n>    ⟨residual-membrane, vesicle-membrane, content, siblings⟩
//                                           — an engulfing membrane offer
//   ex<n>     ⟨residual-membrane, content, siblings⟩
//                                           — an expel offer awaiting coexo
//
// Membrane-level table keys: one per enabled action occurrence,
// (kind, channel, continuation, argument), rate ι(channel), with parallel
// composition folding the sibling membrane into each continuation.
//
// The id rows restricted over targets form the successor-class rate map;
// `id_successors` exposes exactly that.
//
// ============================================================================

#pragma once

#include "branesim/canonical.hpp"
#include "branesim/rates.hpp"

#include <map>
#include <vector>

namespace brane::oracle {

// ── membrane measure ────────────────────────────────────────────────────────

struct MemKey {
    ActionKind kind = ActionKind::Phago;
    Name channel;
    CanonMembranePtr continuation;  // residual behavior after the action fires
    CanonMembranePtr argument;      // vesicle membrane for cophago/pino; else null
};
int compare(const MemKey& a, const MemKey& b);
struct MemKeyLess {
    bool operator()(const MemKey& a, const MemKey& b) const { return compare(a, b) < 0; }
};
using MembraneMeasure = std::map<MemKey, Rational, MemKeyLess>;

// ── system measure ──────────────────────────────────────────────────────────

enum class Label { Id, Ph, PhCo, Ex };
const char* to_label_name(Label l);  // "id", "ph", "ph'", "ex"

struct SystemKey {
    Label label = Label::Id;
    Name channel;                         // empty for Id
    std::vector<CanonMembranePtr> mems;   // membrane components, in order
    std::vector<CanonSystemPtr> syss;     // system components, in order
};
int compare(const SystemKey& a, const SystemKey& b);
struct SystemKeyLess {
    bool operator()(const SystemKey& a, const SystemKey& b) const {
        return compare(a, b) < 0;
    }
};
using SystemMeasure = std::map<SystemKey, Rational, SystemKeyLess>;

// ── evaluation ──────────────────────────────────────────────────────────────

MembraneMeasure measure_membrane(const MembranePtr& m, const RateTable& rates);
SystemMeasure measure_system(const SystemPtr& s, const RateTable& rates);

// Total rate into each successor congruence class (the id rows).
using SuccessorRates = std::map<CanonSystemPtr, Rational, CanonSystemPtrLess>;
SuccessorRates id_successors(const SystemPtr& s, const RateTable& rates);

}  // namespace brane::oracle
