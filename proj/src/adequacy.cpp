#include "branesim/adequacy.hpp"

#include "branesim/normal.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

namespace brane::adequacy {

// ── generation ──────────────────────────────────────────────────────────────

namespace {

class Generator {
  public:
    Generator(sim::Rng& rng, const GeneratorConfig& cfg) : rng_(rng), cfg_(cfg) {}

    SystemPtr system(int depth) {
        int width = 1 + pick(cfg_.max_width);
        SystemPtr out;
        for (int i = 0; i < width; ++i) {
            SystemPtr item = replicate(count(), cell(membrane(depth), content(depth)));
            out = out ? compose(std::move(out), std::move(item)) : std::move(item);
        }
        return out ? out : void_system();
    }

  private:
    int pick(int n) {
        return static_cast<int>(rng_.uniform_unit() * n) % n;  // 0..n-1
    }
    bool chance(double p) { return rng_.uniform_unit() <= p; }
    Count count() { return chance(0.25) ? Count(1 + pick(cfg_.max_count)) : Count(1); }
    Name channel() { return std::string(1, static_cast<char>('a' + pick(cfg_.alphabet))); }

    SystemPtr content(int depth) {
        if (depth <= 0 || chance(0.4)) return void_system();
        return system(depth - 1);
    }

    MembranePtr membrane(int depth) {
        if (chance(0.1)) return zero_membrane();
        int guards = 1 + pick(2);
        MembranePtr out;
        for (int i = 0; i < guards; ++i) {
            MembranePtr g = guard(depth);
            out = out ? par(std::move(out), std::move(g)) : std::move(g);
        }
        return out;
    }

    MembranePtr guard(int depth) {
        auto kind = static_cast<ActionKind>(pick(5));
        MembranePtr argument;
        if (action_takes_argument(kind))
            argument = (depth > 0 && chance(0.5)) ? membrane(depth - 1) : zero_membrane();
        MembranePtr continuation = zero_membrane();
        if (depth > 0 && chance(0.4)) continuation = guard(depth - 1);
        return action(kind, channel(), std::move(argument), std::move(continuation));
    }

    sim::Rng& rng_;
    const GeneratorConfig& cfg_;
};

bool membrane_has_action(const MembranePtr& m) {
    switch (m->tag) {
        case Membrane::Tag::Zero: return false;
        case Membrane::Tag::Action: return true;
        case Membrane::Tag::Par:
            return membrane_has_action(m->left) || membrane_has_action(m->right);
    }
    return false;
}

bool system_has_action(const SystemPtr& s) {
    switch (s->tag) {
        case System::Tag::Void: return false;
        case System::Tag::Compose:
            return system_has_action(s->left) || system_has_action(s->right);
        case System::Tag::Cell:
            return membrane_has_action(s->membrane) || system_has_action(s->content);
    }
    return false;
}

}  // namespace

SystemPtr generate_system(sim::Rng& rng, const GeneratorConfig& cfg) {
    Generator gen(rng, cfg);
    for (;;) {
        SystemPtr P = gen.system(cfg.max_depth);
        if (system_has_action(P)) return P;
    }
}

RateTable generate_rates(sim::Rng& rng, const GeneratorConfig& cfg) {
    static const Rational choices[] = {
        Rational(1),     Rational(2),      Rational(5),     Rational(10),
        Rational(1, 2),  Rational(1, 4),   Rational(5, 2),  Rational(3),
        Rational(7, 10), Rational(13, 8),
    };
    RateTable table;
    for (int i = 0; i < cfg.alphabet; ++i) {
        auto idx = static_cast<std::size_t>(rng.uniform_unit() * std::size(choices)) %
                   std::size(choices);
        table.set(std::string(1, static_cast<char>('a' + i)), choices[idx]);
    }
    return table;
}

// ── checks ──────────────────────────────────────────────────────────────────

namespace {

std::string describe_reaction(const sim::Reaction& O) {
    std::ostringstream os;
    os << to_keyword(O.kind) << "<" << O.channel << ">";
    return os.str();
}

}  // namespace

std::optional<Counterexample> check_adequacy(const SystemPtr& P, const RateTable& rates,
                                             const CheckOptions& options) {
    auto fail = [&](const std::string& detail) {
        return Counterexample{P, detail};
    };
    try {
        oracle::SuccessorRates reference = oracle::id_successors(P, rates);
        CanonSystemSet reductions = reduce_all(P);
        sim::Machine initial = sim::machine_init(P, rates, 0x5EEDu);

        if (brane::compare(sim::decode(initial.species), canonical_system(P)) != 0)
            return fail("encode/decode round-trip mismatch: got [" +
                        to_string(sim::decode(initial.species)) + "]");

        CanonSystemSet covered;
        for (const auto& [O, act] : initial.reactions) {
            Rational exact = sim::exact_propensity(O, initial.species);
            if (exact == 0) continue;
            sim::Machine forked = initial;
            sim::fire(forked, O, forked.now);
            CanonSystemPtr target = sim::decode(forked.species);
            covered.insert(target);
            auto it = reference.find(target);
            if (it == reference.end())
                return fail("transition " + describe_reaction(O) +
                            " reaches [" + to_string(target) +
                            "], which has no reference rate");
            if (options.float_mode) {
                double machine_a = act.propensity;
                double reference_a = to_double(it->second);
                if (std::fabs(machine_a - reference_a) >
                    options.rel_tol * std::fabs(reference_a)) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "float propensity mismatch for " << describe_reaction(O)
                       << " at [" << to_string(target) << "]: machine " << machine_a
                       << ", reference " << reference_a;
                    return fail(os.str());
                }
            } else if (exact != it->second) {
                return fail("propensity mismatch for " + describe_reaction(O) + " at [" +
                            to_string(target) + "]: machine " + to_string(exact) +
                            ", reference " + to_string(it->second));
            }
        }
        for (const CanonSystemPtr& Q : reductions)
            if (!covered.count(Q))
                return fail("no machine transition reaches reduction successor [" +
                            to_string(Q) + "]");
        for (const auto& [Q, r] : reference) {
            (void)r;
            if (!covered.count(Q))
                return fail("no machine transition reaches positive-rate successor [" +
                            to_string(Q) + "]");
        }
    } catch (const std::exception& e) {
        return fail(std::string("exception: ") + e.what());
    }
    return std::nullopt;
}

std::optional<Counterexample> check_oracle_consistency(const SystemPtr& P,
                                                       const RateTable& rates) {
    try {
        oracle::SuccessorRates reference = oracle::id_successors(P, rates);
        CanonSystemSet reductions = reduce_all(P);
        for (const auto& [Q, r] : reference) {
            (void)r;
            if (!reductions.count(Q))
                return Counterexample{
                    P, "reference successor [" + to_string(Q) +
                           "] is not a structural one-step successor"};
        }
        for (const CanonSystemPtr& Q : reductions)
            if (!reference.count(Q))
                return Counterexample{
                    P, "structural successor [" + to_string(Q) +
                           "] has no positive reference rate"};
    } catch (const std::exception& e) {
        return Counterexample{P, std::string("exception: ") + e.what()};
    }
    return std::nullopt;
}

// ── shrinking ───────────────────────────────────────────────────────────────

namespace {

void collect_variants(const SystemPtr& P, std::vector<SystemPtr>& out, int budget) {
    NormalSystem nf = to_normal_form(P);
    if (nf.empty()) return;
    auto rebuild = [&](std::size_t skip, const NormalCell* replacement) {
        NormalSystem copy;
        for (std::size_t i = 0; i < nf.size(); ++i) {
            if (i == skip) {
                if (replacement) copy.push_back(*replacement);
            } else {
                copy.push_back(nf[i]);
            }
        }
        out.push_back(unfold(copy));
    };
    // Drop a whole entry.
    for (std::size_t i = 0; i < nf.size(); ++i) rebuild(i, nullptr);
    // Collapse a multiplicity.
    for (std::size_t i = 0; i < nf.size(); ++i) {
        if (nf[i].count > 1) {
            NormalCell c = nf[i];
            c.count = 1;
            rebuild(i, &c);
        }
    }
    // Gut a content.
    for (std::size_t i = 0; i < nf.size(); ++i) {
        if (nf[i].content->tag != System::Tag::Void) {
            NormalCell c = nf[i];
            c.content = void_system();
            rebuild(i, &c);
        }
    }
    // Remove one action occurrence from a membrane.
    for (std::size_t i = 0; i < nf.size(); ++i) {
        CanonMembranePtr cm = canonical_membrane(nf[i].membrane);
        for (const auto& [a, countm] : cm->actions) {
            (void)countm;
            NormalCell c = nf[i];
            c.membrane = reify(without_action(cm, a));
            rebuild(i, &c);
        }
    }
    // Shrink inside a content (bounded recursion).
    if (budget > 0) {
        for (std::size_t i = 0; i < nf.size(); ++i) {
            if (nf[i].content->tag == System::Tag::Void) continue;
            std::vector<SystemPtr> inner;
            collect_variants(nf[i].content, inner, budget - 1);
            for (const SystemPtr& v : inner) {
                NormalCell c = nf[i];
                c.content = v;
                rebuild(i, &c);
            }
        }
    }
}

}  // namespace

SystemPtr shrink(const SystemPtr& failing,
                 const std::function<bool(const SystemPtr&)>& still_fails) {
    SystemPtr current = failing;
    for (int round = 0; round < 64; ++round) {
        std::vector<SystemPtr> variants;
        collect_variants(current, variants, 4);
        bool improved = false;
        for (const SystemPtr& v : variants) {
            if (still_fails(v)) {
                current = v;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return current;
}

// ── suite ───────────────────────────────────────────────────────────────────

SuiteResult run_suite(std::uint64_t seed, std::size_t cases, const GeneratorConfig& cfg,
                      const CheckOptions& options) {
    SuiteResult result;
    result.cases = cases;
    std::vector<std::optional<Counterexample>> failures(cases);
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> found{false};
    auto work = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= cases || found.load()) return;
            sim::Rng rng(sim::split_seed(seed, i));
            SystemPtr P = generate_system(rng, cfg);
            RateTable rates = generate_rates(rng, cfg);
            std::optional<Counterexample> failure = check_adequacy(P, rates, options);
            if (!failure) failure = check_oracle_consistency(P, rates);
            if (failure) {
                failures[i] = std::move(failure);
                found.store(true);
            }
        }
    };
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, cases)));
    if (workers <= 1 || cases <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < cases; ++i) {
        if (!failures[i]) continue;
        Counterexample ce = *failures[i];
        // Re-derive this case's rates for the shrink predicate.
        sim::Rng rng(sim::split_seed(seed, i));
        (void)generate_system(rng, cfg);
        RateTable rates = generate_rates(rng, cfg);
        auto pred = [&](const SystemPtr& v) {
            return check_adequacy(v, rates, options).has_value() ||
                   check_oracle_consistency(v, rates).has_value();
        };
        ce.system = shrink(ce.system, pred);
        auto failure = check_adequacy(ce.system, rates, options);
        if (!failure) failure = check_oracle_consistency(ce.system, rates);
        if (failure) ce.detail = failure->detail;
        result.failure = std::move(ce);
        break;
    }
    return result;
}

}  // namespace brane::adequacy
