// ============================================================================
// normal.hpp — grouped normal form of a system
// ============================================================================
//
// A normal form lists one entry per congruence class of top-level cell,
// with its multiplicity. This is the surface the population machine encodes
// from: congruent siblings become a single species with a count.
//
// ============================================================================

#pragma once

#include "branesim/ast.hpp"
#include "branesim/canonical.hpp"

#include <vector>

namespace brane {

struct NormalCell {
    Count count;  // ≥ 1
    MembranePtr membrane;
    SystemPtr content;
};

// Entries are pairwise non-congruent, in canonical order.
using NormalSystem = std::vector<NormalCell>;

NormalSystem to_normal_form(const SystemPtr& s);
SystemPtr unfold(const NormalSystem& n);

}  // namespace brane
