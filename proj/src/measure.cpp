#include "branesim/measure.hpp"

namespace brane::oracle {

// ── key orders ──────────────────────────────────────────────────────────────

int compare(const MemKey& a, const MemKey& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    if (int c = a.channel.compare(b.channel)) return c < 0 ? -1 : 1;
    if (int c = compare(a.continuation, b.continuation)) return c;
    return compare(a.argument, b.argument);
}

const char* to_label_name(Label l) {
    switch (l) {
        case Label::Id: return "id";
        case Label::Ph: return "ph";
        case Label::PhCo: return "ph'";
        case Label::Ex: return "ex";
    }
    return "?";
}

int compare(const SystemKey& a, const SystemKey& b) {
    if (a.label != b.label)
        return static_cast<int>(a.label) < static_cast<int>(b.label) ? -1 : 1;
    if (int c = a.channel.compare(b.channel)) return c < 0 ? -1 : 1;
    // Within a label the component layout is fixed, so sizes only differ
    // across labels; compare pointwise.
    if (a.mems.size() != b.mems.size()) return a.mems.size() < b.mems.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.mems.size(); ++i)
        if (int c = compare(a.mems[i], b.mems[i])) return c;
    if (a.syss.size() != b.syss.size()) return a.syss.size() < b.syss.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.syss.size(); ++i)
        if (int c = compare(a.syss[i], b.syss[i])) return c;
    return 0;
}

// ── evaluation ──────────────────────────────────────────────────────────────

namespace {

SystemKey id_key(CanonSystemPtr target) {
    SystemKey k;
    k.label = Label::Id;
    k.syss = {std::move(target)};
    return k;
}

// Structural recursion with memoization on node identity; shares one
// canonicalizer so canonical subterms are computed once.
class Evaluator {
  public:
    explicit Evaluator(const RateTable& rates) : rates_(rates) {}

    const MembraneMeasure& membrane(const MembranePtr& m) {
        auto it = mem_memo_.find(m.get());
        if (it != mem_memo_.end()) return it->second;
        MembraneMeasure table;
        switch (m->tag) {
            case Membrane::Tag::Zero:
                break;
            case Membrane::Tag::Action: {
                MemKey k;
                k.kind = m->kind;
                k.channel = m->channel;
                k.continuation = canon_.membrane(m->continuation);
                k.argument = m->argument ? canon_.membrane(m->argument) : nullptr;
                table.emplace(std::move(k), rates_.rate(m->channel));
                break;
            }
            case Membrane::Tag::Par: {
                // Each side keeps its actions; the other side's whole
                // behavior joins the continuation.
                const MembraneMeasure& left = membrane(m->left);
                const MembraneMeasure& right = membrane(m->right);
                CanonMembranePtr lc = canon_.membrane(m->left);
                CanonMembranePtr rc = canon_.membrane(m->right);
                auto shift = [&table](const MembraneMeasure& side,
                                      const CanonMembranePtr& other) {
                    for (const auto& [k, r] : side) {
                        MemKey shifted = k;
                        shifted.continuation = merge(k.continuation, other);
                        table[shifted] += r;
                    }
                };
                shift(left, rc);
                shift(right, lc);
                break;
            }
        }
        return mem_memo_.emplace(m.get(), std::move(table)).first->second;
    }

    const SystemMeasure& system(const SystemPtr& s) {
        auto it = sys_memo_.find(s.get());
        if (it != sys_memo_.end()) return it->second;
        SystemMeasure table;
        switch (s->tag) {
            case System::Tag::Void:
                break;
            case System::Tag::Cell:
                table = nest(membrane(s->membrane), canon_.membrane(s->membrane),
                             system(s->content), canon_.system(s->content));
                break;
            case System::Tag::Compose:
                table = compose_tables(system(s->left), canon_.system(s->left),
                                       system(s->right), canon_.system(s->right));
                break;
        }
        return sys_memo_.emplace(s.get(), std::move(table)).first->second;
    }

  private:
    // Measure of a cell: the membrane's own actions become offers or
    // completed steps, the content's completed steps are wrapped, and the
    // content's expel offers synchronize with the membrane's coexo.
    SystemMeasure nest(const MembraneMeasure& nu, const CanonMembranePtr& sigma,
                       const SystemMeasure& mu, const CanonSystemPtr& content) {
        SystemMeasure out;
        const CanonSystemPtr empty_sys = empty_canon_system();
        for (const auto& [k, r] : nu) {
            switch (k.kind) {
                case ActionKind::Phago: {
                    SystemKey key;
                    key.label = Label::Ph;
                    key.channel = k.channel;
                    key.syss = {make_cell_system(k.continuation, content), empty_sys};
                    out[key] += r;
                    break;
                }
                case ActionKind::CoPhago: {
                    SystemKey key;
                    key.label = Label::PhCo;
                    key.channel = k.channel;
                    key.mems = {k.continuation, k.argument};
                    key.syss = {content, empty_sys};
                    out[key] += r;
                    break;
                }
                case ActionKind::Exo: {
                    SystemKey key;
                    key.label = Label::Ex;
                    key.channel = k.channel;
                    key.mems = {k.continuation};
                    key.syss = {content, empty_sys};
                    out[key] += r;
                    break;
                }
                case ActionKind::Pino: {
                    CanonSystemPtr vesicle = make_cell_system(k.argument, empty_sys);
                    CanonSystemPtr target =
                        make_cell_system(k.continuation, merge(vesicle, content));
                    out[id_key(std::move(target))] += r;
                    break;
                }
                case ActionKind::CoExo:
                    break;  // synchronizes below
            }
        }
        for (const auto& [k, r] : mu) {
            if (k.label == Label::Id) {
                out[id_key(make_cell_system(sigma, k.syss[0]))] += r;
            } else if (k.label == Label::Ex) {
                for (const auto& [k2, r2] : nu) {
                    if (k2.kind != ActionKind::CoExo || k2.channel != k.channel) continue;
                    // Inner membrane (residual) fuses with this membrane's
                    // residual; the expelled content escapes alongside.
                    const CanonMembranePtr& inner_residual = k.mems[0];
                    const CanonSystemPtr& expelled = k.syss[0];
                    const CanonSystemPtr& kept = k.syss[1];
                    CanonMembranePtr fused = merge(inner_residual, k2.continuation);
                    CanonSystemPtr target =
                        merge(make_cell_system(fused, kept), expelled);
                    out[id_key(std::move(target))] += r * r2 / rates_.rate(k.channel);
                }
            }
            // Ph/PhCo offers do not cross a membrane.
        }
        return out;
    }

    // Measure of a composition: offers widen their sibling component, and
    // ph/ph' offers on the same channel synchronize into completed steps.
    SystemMeasure compose_tables(const SystemMeasure& left, const CanonSystemPtr& lc,
                                 const SystemMeasure& right, const CanonSystemPtr& rc) {
        SystemMeasure out;
        auto lift = [&out](const SystemMeasure& side, const CanonSystemPtr& other) {
            for (const auto& [k, r] : side) {
                SystemKey widened = k;
                widened.syss.back() = merge(k.syss.back(), other);
                out[widened] += r;
            }
        };
        lift(left, rc);
        lift(right, lc);
        auto sync = [&](const SystemMeasure& ph_side, const SystemMeasure& co_side) {
            for (const auto& [kp, rp] : ph_side) {
                if (kp.label != Label::Ph) continue;
                for (const auto& [kc, rc2] : co_side) {
                    if (kc.label != Label::PhCo || kc.channel != kp.channel) continue;
                    const CanonSystemPtr& engulfed = kp.syss[0];
                    const CanonSystemPtr& ph_rest = kp.syss[1];
                    const CanonMembranePtr& residual = kc.mems[0];
                    const CanonMembranePtr& vesicle_membrane = kc.mems[1];
                    const CanonSystemPtr& engulfer_content = kc.syss[0];
                    const CanonSystemPtr& co_rest = kc.syss[1];
                    CanonSystemPtr vesicle = make_cell_system(vesicle_membrane, engulfed);
                    CanonSystemPtr engulfer =
                        make_cell_system(residual, merge(vesicle, engulfer_content));
                    CanonSystemPtr target = merge(engulfer, merge(ph_rest, co_rest));
                    out[id_key(std::move(target))] += rp * rc2 / rates_.rate(kp.channel);
                }
            }
        };
        sync(left, right);
        sync(right, left);
        return out;
    }

    const RateTable& rates_;
    Canonicalizer canon_;
    std::map<const Membrane*, MembraneMeasure> mem_memo_;
    std::map<const System*, SystemMeasure> sys_memo_;
};

}  // namespace

MembraneMeasure measure_membrane(const MembranePtr& m, const RateTable& rates) {
    Evaluator ev(rates);
    return ev.membrane(m);
}

SystemMeasure measure_system(const SystemPtr& s, const RateTable& rates) {
    Evaluator ev(rates);
    return ev.system(s);
}

SuccessorRates id_successors(const SystemPtr& s, const RateTable& rates) {
    SuccessorRates out;
    for (const auto& [k, r] : measure_system(s, rates))
        if (k.label == Label::Id) out[k.syss[0]] += r;
    return out;
}

}  // namespace brane::oracle
