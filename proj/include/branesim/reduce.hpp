// ============================================================================
// reduce.hpp — one-step reduction, enumerated structurally
// ============================================================================
//
// Enumerates every congruence class reachable in one reduction step by
// direct surgery on canonical forms (engulf between siblings, expel across
// a parent/child pair, internal vesicle formation, and reduction inside any
// cell). This is computed independently of the rate tables, so it serves as
// a cross-check on the id rows of the measure semantics.
//
// ============================================================================

#pragma once

#include "branesim/canonical.hpp"

namespace brane {

CanonSystemSet reduce_all(const SystemPtr& s);
CanonSystemSet reduce_all_canonical(const CanonSystemPtr& s);

}  // namespace brane
