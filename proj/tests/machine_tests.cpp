#include "doctest.h"

#include "branesim/machine.hpp"
#include "branesim/measure.hpp"
#include "branesim/parse.hpp"
#include "branesim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace brane;
using namespace brane::sim;

namespace {

const char* kTwoPopulations =
    "10000 * phago<n>.exo<m>[phago<k>[void]] o 100 * "
    "cophago<n>(coexo<m>)|coexo<m>[phago<k>[void]]";

Machine init_of(const std::string& system, const std::string& rates,
                std::uint64_t seed = 1) {
    return machine_init(parse_system(system), parse_rates(rates), seed);
}

std::multiset<Rational> schedule_propensities(const Machine& M) {
    std::multiset<Rational> out;
    for (const auto& [O, act] : M.reactions) {
        (void)act;
        out.insert(exact_propensity(O, M.species));
    }
    return out;
}

std::multiset<Count> species_counts(const Machine& M) {
    std::multiset<Count> out;
    for (const auto& [I, c] : M.species) {
        (void)I;
        out.insert(c);
    }
    return out;
}

bool decodes_to(const Machine& M, const std::string& expected) {
    return compare(decode(M.species), canonical_system(parse_system(expected))) == 0;
}

}  // namespace

TEST_CASE("encoding flattens populations into counted species") {
    Machine M = init_of(kTwoPopulations, "n = 10\nk = 5\nm = 5");
    CHECK(M.species.size() == 4);
    CHECK(species_counts(M) == std::multiset<Count>{1, 1, 100, 10000});
    REQUIRE(M.reactions.size() == 1);
    const Reaction& O = M.reactions.begin()->first;
    CHECK(O.kind == ActionKind::Phago);
    CHECK(O.channel == "n");
    CHECK(O.rate == 10);
    CHECK(O.reactants.size() == 2);
    CHECK(exact_propensity(O, M.species) == 10000000);
    CHECK(propensity(O, M.species) == 10000000.0);
    CHECK(M.reactions.begin()->second.propensity == 10000000.0);
    CHECK(decodes_to(M, kTwoPopulations));
}

TEST_CASE("encode/decode round-trips on hand-written systems") {
    const char* systems[] = {
        "void",
        "pino<n>(0)[void]",
        "2 * cophago<n>(0)|phago<n>[void]",
        "coexo<n>[exo<n>[phago<m>[void]]] o cophago<m>(0)[void]",
        "3 * exo<a>[exo<b>[exo<c>[void]]] o 0[phago<d>[void]]",
        kTwoPopulations,
    };
    for (const char* text : systems) {
        CAPTURE(text);
        Machine M = init_of(text, "");
        CHECK(decodes_to(M, text));
    }
}

TEST_CASE("a vesicle reaction consumes one instance and forms a fresh compartment") {
    Machine M = init_of("pino<n>(0)[void]", "n = 10");
    REQUIRE(M.species.size() == 1);
    REQUIRE(M.reactions.size() == 1);
    const Reaction& O = M.reactions.begin()->first;
    CHECK(O.kind == ActionKind::Pino);
    CHECK(O.rate == 10);
    REQUIRE(O.reactants.size() == 1);
    CHECK(O.reactants.begin()->second == 1);
    REQUIRE(O.products.size() == 2);
    bool has_fresh = false;
    for (const auto& [I, c] : O.products) {
        (void)c;
        if (I.inner == kFreshName) has_fresh = true;
    }
    CHECK(has_fresh);
    CHECK(exact_propensity(O, M.species) == 10);
}

TEST_CASE("an expel reaction carries the compartment renaming") {
    Machine M = init_of("coexo<n>[exo<n>[void]]", "n = 10");
    REQUIRE(M.reactions.size() == 1);
    const Reaction& O = M.reactions.begin()->first;
    CHECK(O.kind == ActionKind::Exo);
    CHECK(O.rename.has);
    CHECK(O.rename.from == 2);  // the child's own compartment
    CHECK(O.rename.to == kRoot);
    // The pair fuses into a single empty membrane.
    REQUIRE(O.products.size() == 1);
    CHECK(O.products.begin()->first.complex->empty());
}

TEST_CASE("effective multiplicity follows the ancestor chain") {
    Machine M = init_of(kTwoPopulations, "n = 10\nk = 5\nm = 5");
    CanonMembranePtr inner_complex = canonical_membrane(parse_membrane("phago<k>"));
    std::multiset<Count> stars;
    for (const auto& [I, c] : M.species) {
        (void)c;
        if (compare(I.complex, inner_complex) == 0) stars.insert(s_star(M.species, I));
    }
    CHECK(stars == std::multiset<Count>{100, 10000});
}

TEST_CASE("a shared ancestor multiplies the propensity once") {
    // Two congruent parents, each containing one engulfer/engulfee pair:
    // the pair's common ancestor count scales the rate linearly.
    Machine M = init_of("2 * exo<z>[cophago<n>(0)[void] o phago<n>[void]]", "n = 3");
    REQUIRE(M.reactions.size() == 1);
    Rational machine_rate = exact_propensity(M.reactions.begin()->first, M.species);
    CHECK(machine_rate == 6);
    auto reference = oracle::id_successors(
        parse_system("2 * exo<z>[cophago<n>(0)[void] o phago<n>[void]]"),
        parse_rates("n = 3"));
    REQUIRE(reference.size() == 1);
    CHECK(machine_rate == reference.begin()->second);
}

TEST_CASE("copy-on-write splits lineages without changing the decoding") {
    Machine M = init_of(kTwoPopulations, "n = 10\nk = 5\nm = 5");
    Reaction O = M.reactions.begin()->first;
    CowOutcome outcome = cow_reactants(M, O);
    // Both reactants now have private unit-multiplicity instances.
    REQUIRE(outcome.fire_reactants.size() == 2);
    for (const auto& [I, c] : outcome.fire_reactants) {
        CHECK(c == 1);
        auto it = M.species.find(I);
        REQUIRE(it != M.species.end());
        CHECK(it->second == 1);
    }
    CHECK(decodes_to(M, kTwoPopulations));
    verify_machine(M);
    // The 10000/100 groups split as 1+9999 and 1+99; the four reactions over
    // the split pairs carry the redex count 10000·100·10 between them.
    CHECK(schedule_propensities(M) ==
          std::multiset<Rational>{10, 99990, 990, 9899010});
    Rational total = 0;
    for (const Rational& a : schedule_propensities(M)) total += a;
    CHECK(total == 10000000);
}

TEST_CASE("the first step engulfs and schedules the inner expel") {
    Machine M = init_of(kTwoPopulations, "n = 10\nk = 5\nm = 5");
    auto outcome = step(M);
    REQUIRE(outcome.has_value());
    CHECK(outcome->kind == ActionKind::Phago);
    CHECK(outcome->channel == "n");
    CHECK(outcome->propensity == 10000000.0);
    CHECK(outcome->time > 0);
    CHECK(M.now == outcome->time);
    CHECK(decodes_to(M,
                     "9999 * phago<n>.exo<m>[phago<k>[void]] o 99 * "
                     "cophago<n>(coexo<m>)|coexo<m>[phago<k>[void]] o "
                     "coexo<m>[coexo<m>[exo<m>[phago<k>[void]]] o phago<k>[void]]"));
    CHECK(live_species(M.species) == 9);
    bool found_expel = false;
    for (const auto& [O, act] : M.reactions) {
        (void)act;
        if (O.kind == ActionKind::Exo && O.channel == "m") {
            found_expel = true;
            CHECK(O.rate == 5);
            CHECK(O.rename.has);
        }
    }
    CHECK(found_expel);
    verify_machine(M);
}

TEST_CASE("a self-pair separates into two instances when it fires") {
    Machine M = init_of("2 * cophago<n>(0)|phago<n>[void]", "n = 7");
    REQUIRE(M.species.size() == 1);
    CHECK(M.species.begin()->second == 2);
    REQUIRE(M.reactions.size() == 1);
    const Reaction& O = M.reactions.begin()->first;
    CHECK(O.kind == ActionKind::Phago);
    REQUIRE(O.reactants.size() == 1);
    CHECK(O.reactants.begin()->second == 2);
    CHECK(O.rate == 14);  // both orderings of the pair
    CHECK(exact_propensity(O, M.species) == 14);
    CHECK(exact_propensity(O, M.species) ==
          oracle::id_successors(parse_system("2 * cophago<n>(0)|phago<n>[void]"),
                                parse_rates("n = 7"))
              .begin()
              ->second);
    auto outcome = step(M);
    REQUIRE(outcome.has_value());
    CHECK(decodes_to(M, "phago<n>[0[cophago<n>(0)[void]]]"));
    verify_machine(M);
}

TEST_CASE("relocated content pairs with existing species") {
    // The expel surfaces an engulfer's future partner at the root; the new
    // engulf reaction spans a product and a species that never moved.
    Machine M = init_of("coexo<n>[exo<n>[phago<m>[void]]] o cophago<m>(0)[void]",
                       "n = 2\nm = 3");
    REQUIRE(M.reactions.size() == 1);
    CHECK(M.reactions.begin()->first.kind == ActionKind::Exo);
    auto first = step(M);
    REQUIRE(first.has_value());
    CHECK(first->kind == ActionKind::Exo);
    REQUIRE(M.reactions.size() == 1);
    const Reaction& engulf = M.reactions.begin()->first;
    CHECK(engulf.kind == ActionKind::Phago);
    CHECK(engulf.channel == "m");
    CHECK(exact_propensity(engulf, M.species) == 3);
    auto second = step(M);
    REQUIRE(second.has_value());
    CHECK(second->kind == ActionKind::Phago);
    CHECK(decodes_to(M, "void"));
    CHECK(!step(M).has_value());
    verify_machine(M);
}

TEST_CASE("stepping a deadlocked machine returns nothing") {
    Machine M = init_of("phago<n>[void]", "");
    CHECK(M.reactions.empty());
    CHECK(!step(M).has_value());
    CHECK(M.now == 0);
}

TEST_CASE("steps are reproducible for a fixed seed") {
    auto trajectory = [](std::uint64_t seed) {
        Machine M = init_of("pino<a>(0)[void] o pino<b>(pino<a>(0))[void]",
                            "a = 2\nb = 5", seed);
        std::vector<std::pair<Name, double>> out;
        while (auto o = step(M)) out.emplace_back(o->channel, o->time);
        return out;
    };
    auto a = trajectory(42);
    CHECK(a == trajectory(42));
    CHECK(a != trajectory(43));
    CHECK(!a.empty());
}

TEST_CASE("normalization merges congruent lineages back together") {
    Machine M = init_of("2 * pino<n>(phago<k>)[void]", "n = 1");
    REQUIRE(step(M).has_value());
    REQUIRE(step(M).has_value());
    CHECK(live_species(M.species) == 4);
    CanonSystemPtr before = decode(M.species);
    normalize_machine(M);
    CHECK(live_species(M.species) == 2);
    CHECK(compare(decode(M.species), before) == 0);
    CHECK(decodes_to(M, "2 * 0[phago<k>[void]]"));
    verify_machine(M);
}

TEST_CASE("exponential delays invert the propensity") {
    CHECK(exponential_delay(10, 0.5) == doctest::Approx(std::log(2.0) / 10.0));
    CHECK(std::isinf(exponential_delay(0, 0.5)));
    CHECK(std::isinf(exponential_delay(-1, 0.5)));
}

TEST_CASE("unit draws stay inside the half-open interval") {
    Rng rng(12345);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform_unit();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("seed splitting decorrelates run indices") {
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    CHECK(split_seed(7, 3) == split_seed(7, 3));
}

TEST_CASE("firing an unscheduled reaction is an error") {
    Machine M = init_of("pino<n>(0)[void]", "n = 10");
    Reaction O = M.reactions.begin()->first;
    REQUIRE(step(M).has_value());
    CHECK_THROWS_AS(fire(M, O, M.now), MachineError);
}

TEST_CASE("verification rejects corrupted state") {
    Machine M = init_of("pino<n>(0)[void]", "n = 10");
    verify_machine(M);
    Machine corrupt_count = M;
    corrupt_count.species.begin()->second = -1;
    CHECK_THROWS_AS(verify_machine(corrupt_count), MachineError);
    Machine stale = M;
    stale.reactions.begin()->second.propensity = 123.0;
    CHECK_THROWS_AS(verify_machine(stale), MachineError);
    CHECK(dump_state(M).find("pino") != std::string::npos);
}
