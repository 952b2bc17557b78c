#include "branesim/machine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace brane::sim {

// ── orders ──────────────────────────────────────────────────────────────────

int compare(const Species& a, const Species& b) {
    if (a.outer != b.outer) return a.outer < b.outer ? -1 : 1;
    if (a.inner != b.inner) return a.inner < b.inner ? -1 : 1;
    return brane::compare(a.complex, b.complex);
}

namespace {

int compare_counts_map(const SpeciesCounts& a, const SpeciesCounts& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (int c = compare(ia->first, ib->first)) return c;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

int compare_rational(const Rational& a, const Rational& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

}  // namespace

int compare(const Reaction& a, const Reaction& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    if (int c = a.channel.compare(b.channel)) return c < 0 ? -1 : 1;
    if (int c = compare_counts_map(a.reactants, b.reactants)) return c;
    if (int c = compare_rational(a.rate, b.rate)) return c;
    if (a.rename.has != b.rename.has) return a.rename.has ? 1 : -1;
    if (a.rename.has) {
        if (a.rename.from != b.rename.from) return a.rename.from < b.rename.from ? -1 : 1;
        if (a.rename.to != b.rename.to) return a.rename.to < b.rename.to ? -1 : 1;
    }
    return compare_counts_map(a.products, b.products);
}

// ── randomness ──────────────────────────────────────────────────────────────

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over the xor-combined seed; full-period scrambler, so
    // nearby run indices give unrelated streams.
    std::uint64_t z = master ^ (index * 0x9E3779B97F4A7C15ull);
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::uniform_unit() {
    // 53-bit mantissa shifted into (0, 1]: never zero, so -log stays finite.
    std::uint64_t x = gen_();
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

double exponential_delay(double propensity, double unit_draw) {
    if (!(propensity > 0)) return std::numeric_limits<double>::infinity();
    return -std::log(unit_draw) / propensity;
}

// ── state helpers ───────────────────────────────────────────────────────────

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_placeholder(CompartmentId id) { return id == kFreshName || id == kPartnerName; }

// Live parent: the unique count>0 species whose inner compartment is `outer`.
const std::pair<const Species, Count>* find_live_parent(const SpeciesCounts& S,
                                                        CompartmentId outer) {
    for (const auto& entry : S)
        if (entry.second > 0 && entry.first.inner == outer) return &entry;
    return nullptr;
}

// Live species with the given outer compartment (the map is ordered by outer
// first, so this is a contiguous range).
std::vector<Species> live_at(const SpeciesCounts& S, CompartmentId outer) {
    std::vector<Species> out;
    Species probe;
    probe.outer = outer;
    probe.inner = 0;
    probe.complex = nullptr;
    for (auto it = S.lower_bound(probe); it != S.end() && it->first.outer == outer; ++it)
        if (it->second > 0) out.push_back(it->first);
    return out;
}

Count count_of(const SpeciesCounts& S, const Species& I) {
    auto it = S.find(I);
    return it == S.end() ? Count(0) : it->second;
}

}  // namespace

std::size_t live_species(const SpeciesCounts& S) {
    std::size_t n = 0;
    for (const auto& [key, count] : S) {
        (void)key;
        if (count > 0) ++n;
    }
    return n;
}

Count s_star(const SpeciesCounts& S, const Species& I) {
    Count total = count_of(S, I);
    CompartmentId cur = I.outer;
    std::size_t guard = 0;
    while (cur != kRoot) {
        const auto* parent = find_live_parent(S, cur);
        if (!parent)
            throw MachineError("malformed state: compartment " + std::to_string(cur) +
                               " has no live parent");
        total *= parent->second;
        cur = parent->first.outer;
        if (++guard > S.size() + 1)
            throw MachineError("malformed state: ancestor chain does not reach the root");
    }
    return total;
}

Rational exact_propensity(const Reaction& O, const SpeciesCounts& S) {
    Rational a = O.rate;
    for (const auto& [I, j] : O.reactants) {
        Count choose = binomial(count_of(S, I), j.convert_to<unsigned>());
        if (choose == 0) return Rational(0);
        a *= choose;
    }
    // Ancestors contribute their count once each, even when chains share
    // nodes; reactants themselves are excluded (their counts entered above).
    std::set<CompartmentId> reactant_inners;
    for (const auto& [I, j] : O.reactants) {
        (void)j;
        reactant_inners.insert(I.inner);
    }
    std::map<CompartmentId, Count> ancestors;
    for (const auto& [I, j] : O.reactants) {
        (void)j;
        CompartmentId cur = I.outer;
        std::size_t guard = 0;
        while (cur != kRoot) {
            const auto* parent = find_live_parent(S, cur);
            if (!parent)
                throw MachineError("malformed state: compartment " + std::to_string(cur) +
                                   " has no live parent");
            if (!reactant_inners.count(parent->first.inner))
                ancestors.emplace(parent->first.inner, parent->second);
            cur = parent->first.outer;
            if (++guard > S.size() + 1)
                throw MachineError("malformed state: ancestor chain does not reach the root");
        }
    }
    for (const auto& [inner, count] : ancestors) {
        (void)inner;
        a *= count;
    }
    return a;
}

double propensity(const Reaction& O, const SpeciesCounts& S) {
    return to_double(exact_propensity(O, S));
}

// ── reaction generation ─────────────────────────────────────────────────────

namespace {

Species species_key(CompartmentId outer, CompartmentId inner, CanonMembranePtr complex) {
    Species s;
    s.outer = outer;
    s.inner = inner;
    s.complex = std::move(complex);
    return s;
}

Reaction make_pino(const Species& I, const CanonAction& a, const Count& mult,
                   const RateTable& rates) {
    Reaction O;
    O.kind = ActionKind::Pino;
    O.channel = a.channel;
    O.reactants[I] = 1;
    O.rate = Rational(mult) * rates.rate(a.channel);
    CanonMembranePtr residual = merge(without_action(I.complex, a), a.continuation);
    O.products[species_key(I.outer, I.inner, residual)] += 1;
    O.products[species_key(I.inner, kFreshName, a.argument)] += 1;
    return O;
}

// P carries coexo (parent), C carries exo (child living inside P).
Reaction make_exo(const Species& P, const CanonAction& coexo, const Count& m1,
                  const Species& C, const CanonAction& exo, const Count& m2,
                  const RateTable& rates) {
    Reaction O;
    O.kind = ActionKind::Exo;
    O.channel = exo.channel;
    O.reactants[P] = 1;
    O.reactants[C] = 1;
    O.rate = Rational(m1) * Rational(m2) * rates.rate(exo.channel);
    CanonMembranePtr fused = merge(merge(without_action(P.complex, coexo), coexo.continuation),
                                   merge(without_action(C.complex, exo), exo.continuation));
    O.products[species_key(P.outer, P.inner, fused)] += 1;
    // The child's content surfaces beside the parent.
    O.rename = {true, C.inner, P.outer};
    return O;
}

// E carries cophago (engulfer), F carries phago (engulfed); E == F is the
// self-pair case consuming two instances of one species.
Reaction make_phago(const Species& E, const CanonAction& cophago, const Count& m1,
                    const Species& F, const CanonAction& phago, const Count& m2,
                    const RateTable& rates) {
    Reaction O;
    O.kind = ActionKind::Phago;
    O.channel = phago.channel;
    bool self = compare(E, F) == 0;
    Rational rate = Rational(m1) * Rational(m2) * rates.rate(phago.channel);
    CanonMembranePtr engulfer_residual =
        merge(without_action(E.complex, cophago), cophago.continuation);
    CanonMembranePtr engulfed_residual =
        merge(without_action(F.complex, phago), phago.continuation);
    if (self) {
        // Both ordered pairings of two instances collapse into one reaction;
        // the rate keeps the factor the ordered count C(n,2)·2 = n(n-1)
        // requires. The second instance is separated at fire time and keeps
        // its subtree via the partner placeholder.
        O.reactants[E] = 2;
        O.rate = rate * 2;
        O.products[species_key(E.outer, E.inner, engulfer_residual)] += 1;
        O.products[species_key(E.inner, kFreshName, cophago.argument)] += 1;
        O.products[species_key(kFreshName, kPartnerName, engulfed_residual)] += 1;
    } else {
        O.reactants[E] = 1;
        O.reactants[F] = 1;
        O.rate = rate;
        O.products[species_key(E.outer, E.inner, engulfer_residual)] += 1;
        O.products[species_key(E.inner, kFreshName, cophago.argument)] += 1;
        O.products[species_key(kFreshName, F.inner, engulfed_residual)] += 1;
    }
    return O;
}

}  // namespace

std::vector<Reaction> reactions_for(const Species& I, const SpeciesCounts& S,
                                    const RateTable& rates) {
    std::set<Reaction, ReactionLess> out;
    if (!I.complex || I.complex->empty()) return {};
    for (const auto& [a, mult] : I.complex->actions) {
        switch (a.kind) {
            case ActionKind::Pino:
                out.insert(make_pino(I, a, mult, rates));
                break;
            case ActionKind::CoExo:
                for (const Species& J : live_at(S, I.inner))
                    for (const auto& [b, bm] : J.complex->actions)
                        if (b.kind == ActionKind::Exo && b.channel == a.channel)
                            out.insert(make_exo(I, a, mult, J, b, bm, rates));
                break;
            case ActionKind::Exo:
                if (const auto* parent = find_live_parent(S, I.outer))
                    for (const auto& [b, bm] : parent->first.complex->actions)
                        if (b.kind == ActionKind::CoExo && b.channel == a.channel)
                            out.insert(make_exo(parent->first, b, bm, I, a, mult, rates));
                break;
            case ActionKind::CoPhago:
                for (const Species& J : live_at(S, I.outer))
                    for (const auto& [b, bm] : J.complex->actions)
                        if (b.kind == ActionKind::Phago && b.channel == a.channel)
                            out.insert(make_phago(I, a, mult, J, b, bm, rates));
                break;
            case ActionKind::Phago:
                for (const Species& J : live_at(S, I.outer))
                    for (const auto& [b, bm] : J.complex->actions)
                        if (b.kind == ActionKind::CoPhago && b.channel == a.channel)
                            out.insert(make_phago(J, b, bm, I, a, mult, rates));
                break;
        }
    }
    return {out.begin(), out.end()};
}

// ── scheduling ──────────────────────────────────────────────────────────────

namespace {

Activity fresh_activity(Machine& M, const Reaction& O) {
    double a = propensity(O, M.species);
    Activity act;
    act.propensity = a;
    act.time = a > 0 ? M.now + exponential_delay(a, M.rng.uniform_unit()) : kInf;
    return act;
}

// Generates reactions for the given species and schedules the ones not
// already present (existing reactions keep their tentative times).
void schedule_new_reactions(Machine& M, const std::vector<Species>& created) {
    std::set<Reaction, ReactionLess> candidates;
    for (const Species& I : created)
        for (Reaction& O : reactions_for(I, M.species, M.rates))
            candidates.insert(std::move(O));
    for (const Reaction& O : candidates)
        if (!M.reactions.count(O)) M.reactions.emplace(O, fresh_activity(M, O));
}

// Refreshes every propensity against the current populations, rescaling
// tentative times next-reaction style. Unchanged propensities keep their
// times; zero kills the clock; leaving zero draws a fresh delay.
void update_all(Machine& M) {
    for (auto& [O, act] : M.reactions) {
        double a2 = propensity(O, M.species);
        if (a2 == act.propensity) continue;
        if (!(a2 > 0)) {
            act = {kInf, 0};
        } else if (!(act.propensity > 0) || !std::isfinite(act.time) || act.time == M.now) {
            act = {M.now + exponential_delay(a2, M.rng.uniform_unit()), a2};
        } else {
            act = {M.now + (act.propensity / a2) * (act.time - M.now), a2};
        }
    }
}

// Splits `keep` instances off species A (which keeps its compartment and its
// subtree); the remainder moves to a copy under a fresh inner name with a
// deep-copied subtree. Returns the copy's inner name.
CompartmentId split_species(Machine& M, const Species& A, const Count& keep) {
    auto it = M.species.find(A);
    if (it == M.species.end() || it->second <= keep || keep <= 0)
        throw MachineError("split: bad multiplicity");
    Count moved = it->second - keep;
    it->second = keep;
    CompartmentId copy_inner = M.next_name++;
    Species copy = species_key(A.outer, copy_inner, A.complex);
    std::vector<Species> created{copy};

    // Deep-copy the subtree: children of `from` reappear under `to` with the
    // same per-parent counts.
    auto dup_subtree = [&](auto&& self, CompartmentId from, CompartmentId to) -> void {
        for (const Species& J : live_at(M.species, from)) {
            CompartmentId inner2 = M.next_name++;
            Species J2 = species_key(to, inner2, J.complex);
            M.species[J2] = M.species.at(J);
            created.push_back(J2);
            self(self, J.inner, inner2);
        }
    };
    M.species[copy] = moved;
    dup_subtree(dup_subtree, A.inner, copy_inner);
    schedule_new_reactions(M, created);
    return copy_inner;
}

void sweep(Machine& M) {
    for (auto it = M.species.begin(); it != M.species.end();)
        it = it->second == 0 ? M.species.erase(it) : std::next(it);
    for (auto it = M.reactions.begin(); it != M.reactions.end();) {
        bool dead = false;
        for (const auto& [I, j] : it->first.reactants) {
            (void)j;
            if (!M.species.count(I)) {
                dead = true;
                break;
            }
        }
        it = dead ? M.reactions.erase(it) : std::next(it);
    }
}

}  // namespace

// ── encode / decode ─────────────────────────────────────────────────────────

Machine machine_init(const SystemPtr& P, const RateTable& rates, std::uint64_t seed) {
    Machine M(rates, seed);
    auto build = [&](auto&& self, const CanonSystemPtr& s, CompartmentId at) -> void {
        for (const auto& [c, count] : s->cells) {
            CompartmentId inner = M.next_name++;
            M.species[species_key(at, inner, c.membrane)] = count;
            self(self, c.content, inner);
        }
    };
    build(build, canonical_system(P), kRoot);
    std::vector<Species> all;
    all.reserve(M.species.size());
    for (const auto& [I, count] : M.species) {
        (void)count;
        all.push_back(I);
    }
    schedule_new_reactions(M, all);
    verify_machine(M);
    return M;
}

CanonSystemPtr decode(const SpeciesCounts& S, CompartmentId at) {
    std::vector<std::pair<CanonCell, Count>> cells;
    for (const Species& I : live_at(S, at)) {
        CanonSystemPtr content = decode(S, I.inner);
        // A bare membrane around nothing reads back as nothing.
        if (I.complex->empty() && content->empty()) continue;
        cells.emplace_back(CanonCell{I.complex, std::move(content)}, count_of(S, I));
    }
    return make_canon_system(std::move(cells));
}

// ── operations ──────────────────────────────────────────────────────────────

CowOutcome cow_reactants(Machine& M, const Reaction& O) {
    CowOutcome out;
    for (const auto& [I, j] : O.reactants) {
        // Secure the ancestor chain top-down so each split works under an
        // already-private parent.
        std::vector<Species> chain;
        CompartmentId cur = I.outer;
        std::size_t guard = 0;
        while (cur != kRoot) {
            const auto* parent = find_live_parent(M.species, cur);
            if (!parent)
                throw MachineError("cow: compartment " + std::to_string(cur) +
                                   " has no live parent");
            chain.push_back(parent->first);
            cur = parent->first.outer;
            if (++guard > M.species.size() + 1)
                throw MachineError("cow: ancestor chain does not reach the root");
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            if (count_of(M.species, *it) > 1) split_species(M, *it, 1);
        if (count_of(M.species, I) > j) split_species(M, I, j);
    }
    if (O.reactants.size() == 1 && O.reactants.begin()->second == 2) {
        // Self-pair: separate the second instance so the two consumed copies
        // have distinct compartments.
        const Species& I = O.reactants.begin()->first;
        if (count_of(M.species, I) < 2)
            throw MachineError("cow: self-pair reaction is not enabled");
        out.partner_inner = split_species(M, I, 1);
        out.fire_reactants[I] = 1;
        out.fire_reactants[species_key(I.outer, out.partner_inner, I.complex)] = 1;
    } else {
        out.fire_reactants = O.reactants;
    }
    update_all(M);
    return out;
}

void fire(Machine& M, const Reaction& O, double at, bool normalize_after) {
    if (!M.reactions.count(O)) throw MachineError("fire: reaction is not scheduled");
    M.now = at;
    CowOutcome cow = cow_reactants(M, O);

    // Consume.
    for (const auto& [I, j] : cow.fire_reactants) {
        auto it = M.species.find(I);
        if (it == M.species.end() || it->second < j)
            throw MachineError("fire: reactant count underflow");
        it->second -= j;
    }

    // Resolve product placeholders: one fresh vesicle compartment per firing,
    // and the separated partner for self-pairs.
    CompartmentId fresh = 0;
    bool fresh_allocated = false;
    auto resolve = [&](CompartmentId id) {
        if (id == kFreshName) {
            if (!fresh_allocated) {
                fresh = M.next_name++;
                fresh_allocated = true;
            }
            return fresh;
        }
        if (id == kPartnerName) {
            if (cow.partner_inner == 0)
                throw MachineError("fire: partner placeholder without a self-pair");
            return cow.partner_inner;
        }
        return id;
    };
    SpeciesCounts resolved;
    for (const auto& [P, c] : O.products)
        resolved[species_key(resolve(P.outer), resolve(P.inner), P.complex)] += c;

    // Produce.
    std::vector<Species> introduced;
    for (const auto& [P, c] : resolved) {
        auto [it, inserted] = M.species.try_emplace(P, 0);
        if (inserted || it->second == 0) introduced.push_back(P);
        it->second += c;
    }

    // Relocate: species under the renamed compartment re-root and meet new
    // neighbors, so they regenerate reactions like fresh arrivals.
    if (O.rename.has) {
        for (const Species& K : live_at(M.species, O.rename.from)) {
            Count c = M.species.at(K);
            M.species.erase(K);
            Species K2 = species_key(O.rename.to, K.inner, K.complex);
            if (M.species.count(K2)) throw MachineError("fire: relocation collision");
            M.species[K2] = c;
            introduced.push_back(K2);
        }
    }

    schedule_new_reactions(M, introduced);
    update_all(M);
    if (normalize_after) normalize_machine(M);
    sweep(M);
}

std::optional<StepOutcome> step(Machine& M, bool normalize_after) {
    const Reaction* best = nullptr;
    const Activity* best_act = nullptr;
    for (const auto& [O, act] : M.reactions) {
        if (!std::isfinite(act.time)) continue;
        if (!best || act.time < best_act->time) {
            best = &O;
            best_act = &act;
        }
    }
    if (!best) return std::nullopt;
    StepOutcome out;
    out.kind = best->kind;
    out.channel = best->channel;
    out.time = best_act->time;
    out.propensity = best_act->propensity;
    Reaction chosen = *best;  // fire mutates the schedule
    fire(M, chosen, out.time, normalize_after);
    return out;
}

void normalize_machine(Machine& M) {
    // Merge congruent sibling subtrees: same outer compartment, same complex,
    // congruent decoded content. Counts accumulate on the representative with
    // the smallest inner name; the duplicate subtree and its reactions go away.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Species> live;
        for (const auto& [I, c] : M.species)
            if (c > 0) live.push_back(I);
        for (std::size_t i = 0; i < live.size() && !changed; ++i) {
            for (std::size_t k = i + 1; k < live.size() && !changed; ++k) {
                const Species& a = live[i];
                const Species& b = live[k];
                if (a.outer != b.outer || brane::compare(a.complex, b.complex) != 0)
                    continue;
                if (brane::compare(decode(M.species, a.inner), decode(M.species, b.inner)) != 0)
                    continue;
                M.species[a] += M.species.at(b);
                // Drop b and its whole subtree.
                auto drop = [&](auto&& self, const Species& K) -> void {
                    for (const Species& J : live_at(M.species, K.inner)) self(self, J);
                    M.species.erase(K);
                };
                drop(drop, b);
                changed = true;
            }
        }
    }
    update_all(M);
    for (auto it = M.reactions.begin(); it != M.reactions.end();) {
        bool dead = false;
        for (const auto& [I, j] : it->first.reactants) {
            (void)j;
            if (!M.species.count(I)) {
                dead = true;
                break;
            }
        }
        it = dead ? M.reactions.erase(it) : std::next(it);
    }
}

// ── diagnostics ─────────────────────────────────────────────────────────────

void verify_machine(const Machine& M) {
    std::set<CompartmentId> live_inners;
    for (const auto& [I, c] : M.species) {
        if (c < 0) throw MachineError("verify: negative count");
        if (is_placeholder(I.inner) || is_placeholder(I.outer))
            throw MachineError("verify: placeholder compartment in state");
        if (I.inner == kRoot || I.inner >= M.next_name || I.inner == I.outer)
            throw MachineError("verify: bad inner compartment");
        if (I.outer != kRoot && I.outer >= M.next_name)
            throw MachineError("verify: bad outer compartment");
        if (c > 0 && !live_inners.insert(I.inner).second)
            throw MachineError("verify: duplicate live compartment " +
                               std::to_string(I.inner));
    }
    for (const auto& [I, c] : M.species) {
        if (c == 0) continue;
        CompartmentId cur = I.outer;
        std::size_t guard = 0;
        while (cur != kRoot) {
            const auto* parent = find_live_parent(M.species, cur);
            if (!parent)
                throw MachineError("verify: live species without live parent");
            cur = parent->first.outer;
            if (++guard > M.species.size() + 1)
                throw MachineError("verify: cyclic ancestry");
        }
    }
    for (const auto& [O, act] : M.reactions) {
        if (!(O.rate > 0)) throw MachineError("verify: nonpositive rate");
        if (O.reactants.empty() || O.products.empty())
            throw MachineError("verify: degenerate reaction");
        bool self_pair = O.reactants.size() == 1 && O.reactants.begin()->second == 2;
        for (const auto& [I, j] : O.reactants) {
            if (j != 1 && j != 2) throw MachineError("verify: bad reactant multiplicity");
            if (!M.species.count(I))
                throw MachineError("verify: reactant species missing from state");
        }
        for (const auto& [P, c] : O.products) {
            (void)c;
            if (P.inner == kPartnerName && !self_pair)
                throw MachineError("verify: partner placeholder outside self-pair");
        }
        double a = propensity(O, M.species);
        if (a != act.propensity)
            throw MachineError("verify: stale propensity (stored " +
                               std::to_string(act.propensity) + ", actual " +
                               std::to_string(a) + ")");
        if (a > 0) {
            if (!std::isfinite(act.time) || act.time < M.now)
                throw MachineError("verify: tentative time out of range");
        } else if (act.time != kInf) {
            throw MachineError("verify: zero-propensity reaction with finite time");
        }
    }
}

std::string dump_state(const Machine& M) {
    std::ostringstream os;
    os << "time " << M.now << ", next fresh name " << M.next_name << "\n";
    os << "species (outer inner count complex):\n";
    for (const auto& [I, c] : M.species)
        os << "  " << I.outer << " " << I.inner << " " << c << " [" << to_string(I.complex)
           << "]\n";
    os << "reactions (kind channel rate propensity time reactants):\n";
    for (const auto& [O, act] : M.reactions) {
        os << "  " << to_keyword(O.kind) << " " << O.channel << " rate "
           << to_string(O.rate) << " a " << act.propensity << " t " << act.time << " {";
        bool first = true;
        for (const auto& [I, j] : O.reactants) {
            if (!first) os << ", ";
            first = false;
            os << I.outer << "/" << I.inner << " x" << j;
        }
        os << "}\n";
    }
    return os.str();
}

}  // namespace brane::sim
