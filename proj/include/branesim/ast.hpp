// ============================================================================
// ast.hpp — membrane/system syntax trees
// ============================================================================
//
// Design notes
// ------------
//  * Two sorts: Membrane (combinations of guarded actions) and System
//    (nested cells). Nodes are immutable and shared via shared_ptr, so
//    replicated subterms (e.g. "10000 * cell[...]") can reuse structure;
//    `replicate` builds a balanced composition by doubling, which keeps the
//    node count logarithmic and lets downstream passes memoize on node
//    identity.
//  * Five action kinds. CoPhago and Pino carry a membrane argument (the
//    membrane placed on the new vesicle) in addition to their continuation;
//    the other three carry only a continuation.
//
// ============================================================================

#pragma once

#include "branesim/numeric.hpp"

#include <memory>
#include <string>

namespace brane {

using Name = std::string;

enum class ActionKind { Phago, CoPhago, Exo, CoExo, Pino };

// True for the binary prefixes that carry a membrane argument.
inline bool action_takes_argument(ActionKind k) {
    return k == ActionKind::CoPhago || k == ActionKind::Pino;
}

const char* to_keyword(ActionKind k);  // "phago", "cophago", ...

struct Membrane;
struct System;
using MembranePtr = std::shared_ptr<const Membrane>;
using SystemPtr = std::shared_ptr<const System>;

// Membrane ::= 0 | Membrane|Membrane | prefix.Membrane
struct Membrane {
    enum class Tag { Zero, Par, Action };
    Tag tag = Tag::Zero;

    // Par
    MembranePtr left, right;

    // Action
    ActionKind kind = ActionKind::Phago;
    Name channel;
    MembranePtr argument;      // CoPhago / Pino only, else null
    MembranePtr continuation;  // never null for Action
};

// System ::= void | System o System | Membrane[System]
struct System {
    enum class Tag { Void, Compose, Cell };
    Tag tag = Tag::Void;

    // Compose
    SystemPtr left, right;

    // Cell
    MembranePtr membrane;
    SystemPtr content;
};

MembranePtr zero_membrane();
MembranePtr par(MembranePtr a, MembranePtr b);
MembranePtr action(ActionKind kind, Name channel, MembranePtr argument,
                   MembranePtr continuation);

SystemPtr void_system();
SystemPtr compose(SystemPtr a, SystemPtr b);
SystemPtr cell(MembranePtr membrane, SystemPtr content);

// n-fold composition of `s` with itself (balanced, structure-sharing).
// replicate(0, s) is void.
SystemPtr replicate(const Count& n, const SystemPtr& s);

// Plain structural printing in the input grammar (no reordering). Continuation
// "0" is omitted, so e.g. action(Phago, "n", ..) prints as "phago<n>".
std::string to_string(const MembranePtr& m);
std::string to_string(const SystemPtr& s);

}  // namespace brane
