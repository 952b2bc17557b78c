// ============================================================================
// canonical.hpp — canonical forms deciding structural congruence
// ============================================================================
//
// Design notes
// ------------
//  * Structural congruence is generated by commutative-monoid laws for both
//    composition ("o") and membrane combination ("|"), the empty-cell axiom
//    0[void] ≡ void, and closure under all syntactic contexts (including
//    action arguments and continuations).
//  * A canonical form replaces each associative/commutative layer with a
//    sorted multiset: a membrane becomes a sorted vector of (action, count)
//    pairs whose continuations/arguments are themselves canonical, and a
//    system becomes a sorted vector of (cell, count) pairs with empty cells
//    erased. Two terms are congruent iff their canonical forms are equal,
//    so canonical forms double as map keys throughout the oracle and the
//    machine.
//  * Counts are arbitrary-precision so "10000 * cell[...]" stays one entry.
//  * Canonicalization memoizes on node identity, which keeps it linear in
//    the number of distinct nodes even for the structure-shared trees built
//    by `replicate`.
//
// ============================================================================

#pragma once

#include "branesim/ast.hpp"

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace brane {

struct CanonMembrane;
struct CanonSystem;
using CanonMembranePtr = std::shared_ptr<const CanonMembrane>;
using CanonSystemPtr = std::shared_ptr<const CanonSystem>;

struct CanonAction {
    ActionKind kind = ActionKind::Phago;
    Name channel;
    CanonMembranePtr argument;      // null unless kind carries an argument
    CanonMembranePtr continuation;  // never null
};

// Sorted multiset of actions; entries have pairwise-distinct actions and
// positive counts.
struct CanonMembrane {
    std::vector<std::pair<CanonAction, Count>> actions;
    bool empty() const { return actions.empty(); }
};

struct CanonCell {
    CanonMembranePtr membrane;
    CanonSystemPtr content;
};

// Sorted multiset of cells; fully-empty cells are erased, so the canonical
// form of "0[void]" is the empty system.
struct CanonSystem {
    std::vector<std::pair<CanonCell, Count>> cells;
    bool empty() const { return cells.empty(); }
};

// ── total order ─────────────────────────────────────────────────────────────

int compare(const CanonMembranePtr& a, const CanonMembranePtr& b);
int compare(const CanonSystemPtr& a, const CanonSystemPtr& b);
int compare(const CanonAction& a, const CanonAction& b);
int compare(const CanonCell& a, const CanonCell& b);

struct CanonMembranePtrLess {
    bool operator()(const CanonMembranePtr& a, const CanonMembranePtr& b) const {
        return compare(a, b) < 0;
    }
};
struct CanonSystemPtrLess {
    bool operator()(const CanonSystemPtr& a, const CanonSystemPtr& b) const {
        return compare(a, b) < 0;
    }
};

// ── construction ────────────────────────────────────────────────────────────

CanonMembranePtr empty_canon_membrane();
CanonSystemPtr empty_canon_system();

// Normalizes an arbitrary entry list (sorts, merges duplicates, drops
// nonpositive counts).
CanonMembranePtr make_canon_membrane(std::vector<std::pair<CanonAction, Count>> entries);
CanonSystemPtr make_canon_system(std::vector<std::pair<CanonCell, Count>> entries);

CanonMembranePtr singleton_membrane(CanonAction a, Count n = 1);

// Multiset union.
CanonMembranePtr merge(const CanonMembranePtr& a, const CanonMembranePtr& b);
CanonSystemPtr merge(const CanonSystemPtr& a, const CanonSystemPtr& b);

// Removes n occurrences of an action known to be present.
CanonMembranePtr without_action(const CanonMembranePtr& m, const CanonAction& a,
                                const Count& n = 1);
// Removes n occurrences of a cell known to be present.
CanonSystemPtr without_cell(const CanonSystemPtr& s, const CanonCell& c,
                            const Count& n = 1);

// One cell as a system; erases the empty cell (empty membrane + empty
// content) per the congruence axiom.
CanonSystemPtr make_cell_system(const CanonMembranePtr& membrane,
                                const CanonSystemPtr& content, const Count& count = 1);

// ── canonicalization ────────────────────────────────────────────────────────

// Stateful canonicalizer memoizing on AST node identity.
class Canonicalizer {
  public:
    CanonMembranePtr membrane(const MembranePtr& m);
    CanonSystemPtr system(const SystemPtr& s);

  private:
    std::map<const Membrane*, CanonMembranePtr> mem_memo_;
    std::map<const System*, CanonSystemPtr> sys_memo_;
};

CanonMembranePtr canonical_membrane(const MembranePtr& m);
CanonSystemPtr canonical_system(const SystemPtr& s);

inline bool congruent(const SystemPtr& a, const SystemPtr& b) {
    return compare(canonical_system(a), canonical_system(b)) == 0;
}
inline bool congruent(const MembranePtr& a, const MembranePtr& b) {
    return compare(canonical_membrane(a), canonical_membrane(b)) == 0;
}

// ── back to syntax ──────────────────────────────────────────────────────────

// Builds a representative AST (deterministic: canonical order, counts
// expanded through `replicate`/`par`).
MembranePtr reify(const CanonMembranePtr& m);
SystemPtr reify(const CanonSystemPtr& s);

// Deterministic printing in the input grammar, with multiplicities rendered
// as "n * cell[...]" at the system level and repeated guards in membranes.
std::string to_string(const CanonMembranePtr& m);
std::string to_string(const CanonSystemPtr& s);

using CanonSystemSet = std::set<CanonSystemPtr, CanonSystemPtrLess>;

}  // namespace brane
