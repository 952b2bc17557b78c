#include "branesim/reduce.hpp"

namespace brane {

namespace {

// Removes one instance of entry i (and, if j is given, one of entry j) from
// the cell multiset.
CanonSystemPtr residual_context(const CanonSystemPtr& s, std::size_t i,
                                std::size_t j = static_cast<std::size_t>(-1)) {
    auto entries = s->cells;
    entries[i].second -= 1;
    if (j != static_cast<std::size_t>(-1)) entries[j].second -= 1;
    return make_canon_system(std::move(entries));
}

}  // namespace

CanonSystemSet reduce_all_canonical(const CanonSystemPtr& s) {
    CanonSystemSet out;
    const CanonSystemPtr empty_sys = empty_canon_system();
    const auto& entries = s->cells;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const CanonCell& cell_i = entries[i].first;
        const Count& n_i = entries[i].second;
        const CanonMembranePtr& sigma = cell_i.membrane;
        const CanonSystemPtr& content = cell_i.content;
        CanonSystemPtr context = residual_context(s, i);

        for (const auto& [a, mult] : sigma->actions) {
            (void)mult;
            switch (a.kind) {
                case ActionKind::Pino: {
                    CanonMembranePtr residual =
                        merge(without_action(sigma, a), a.continuation);
                    CanonSystemPtr vesicle = make_cell_system(a.argument, empty_sys);
                    CanonSystemPtr new_cell =
                        make_cell_system(residual, merge(vesicle, content));
                    out.insert(merge(new_cell, context));
                    break;
                }
                case ActionKind::CoExo: {
                    // Pair with an exo-carrying cell at the top of the content.
                    for (std::size_t j = 0; j < content->cells.size(); ++j) {
                        const CanonCell& inner = content->cells[j].first;
                        for (const auto& [b, bm] : inner.membrane->actions) {
                            (void)bm;
                            if (b.kind != ActionKind::Exo || b.channel != a.channel)
                                continue;
                            auto inner_entries = content->cells;
                            inner_entries[j].second -= 1;
                            CanonSystemPtr kept =
                                make_canon_system(std::move(inner_entries));
                            CanonMembranePtr fused =
                                merge(merge(without_action(sigma, a), a.continuation),
                                      merge(without_action(inner.membrane, b),
                                            b.continuation));
                            CanonSystemPtr target = merge(
                                make_cell_system(fused, kept), inner.content);
                            out.insert(merge(target, context));
                        }
                    }
                    break;
                }
                case ActionKind::CoPhago: {
                    // Pair with a phago-carrying sibling (possibly another
                    // instance of this same entry).
                    for (std::size_t j = 0; j < entries.size(); ++j) {
                        if (j == i && n_i < 2) continue;
                        const CanonCell& cell_j = entries[j].first;
                        for (const auto& [b, bm] : cell_j.membrane->actions) {
                            (void)bm;
                            if (b.kind != ActionKind::Phago || b.channel != a.channel)
                                continue;
                            CanonSystemPtr ctx2 =
                                j == i ? residual_context(s, i, i) : residual_context(s, i, j);
                            CanonSystemPtr engulfed = make_cell_system(
                                merge(without_action(cell_j.membrane, b), b.continuation),
                                cell_j.content);
                            CanonSystemPtr vesicle =
                                make_cell_system(a.argument, engulfed);
                            CanonSystemPtr engulfer = make_cell_system(
                                merge(without_action(sigma, a), a.continuation),
                                merge(vesicle, content));
                            out.insert(merge(engulfer, ctx2));
                        }
                    }
                    break;
                }
                case ActionKind::Phago:
                case ActionKind::Exo:
                    break;  // handled from the co-side
            }
        }

        // Reduction inside the cell.
        for (const CanonSystemPtr& t : reduce_all_canonical(content))
            out.insert(merge(make_cell_system(sigma, t), context));
    }
    return out;
}

CanonSystemSet reduce_all(const SystemPtr& s) {
    return reduce_all_canonical(canonical_system(s));
}

}  // namespace brane
