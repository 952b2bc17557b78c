#include "doctest.h"

#include "branesim/parse.hpp"
#include "branesim/rates.hpp"
#include "branesim/simulate.hpp"

#include <sstream>
#include <string>

using namespace brane;
using namespace brane::sim;

namespace {

struct Captured {
    std::string trace;
    std::string census;
    std::vector<RunResult> results;
};

Captured run(const std::string& system, const std::string& rates, RunConfig config) {
    config.want_trace = true;
    config.want_census = true;
    std::ostringstream trace, census;
    auto results =
        run_simulation(parse_system(system), parse_rates(rates), config, &trace, &census);
    return {trace.str(), census.str(), std::move(results)};
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("csv headers are pinned") {
    CHECK(std::string(kTraceHeader) == "run,step,time,kind,name,propensity");
    CHECK(std::string(kCensusHeader) == "run,time,outer,complex,count");
}

TEST_CASE("an empty system terminates immediately") {
    RunConfig config;
    config.seed = 9;
    config.max_steps = 100;
    Captured out = run("void", "", config);
    REQUIRE(out.results.size() == 1);
    CHECK(out.results[0].steps == 0);
    CHECK(out.results[0].deadlocked);
    CHECK(out.results[0].final_time == 0.0);
    CHECK(out.trace == std::string(kTraceHeader) + "\n");
    CHECK(out.census == std::string(kCensusHeader) + "\n");
}

TEST_CASE("a single vesicle step produces one trace row") {
    RunConfig config;
    config.seed = 4;
    config.max_time = 1e9;
    Captured out = run("pino<n>(0)[void]", "n = 10", config);
    REQUIRE(out.results.size() == 1);
    CHECK(out.results[0].steps == 1);
    CHECK(out.results[0].deadlocked);
    REQUIRE(count_lines(out.trace) == 2);
    std::string row = out.trace.substr(out.trace.find('\n') + 1);
    CHECK(row.substr(0, 4) == "1,1,");
    CHECK(row.find(",pino,n,10\n") != std::string::npos);
    CHECK(out.results[0].final_time > 0.0);
}

TEST_CASE("the step cap stops a run early") {
    RunConfig config;
    config.seed = 4;
    config.max_steps = 1;
    Captured out = run("pino<n>(pino<n>(0))[void]", "n = 10", config);
    REQUIRE(out.results.size() == 1);
    CHECK(out.results[0].steps == 1);
    CHECK(!out.results[0].deadlocked);
}

TEST_CASE("the time cap stops a run before the next event") {
    RunConfig config;
    config.seed = 4;
    config.max_time = 0.0;
    Captured out = run("pino<n>(0)[void]", "n = 10", config);
    REQUIRE(out.results.size() == 1);
    CHECK(out.results[0].steps == 0);
    CHECK(!out.results[0].deadlocked);
    CHECK(out.results[0].final_time == 0.0);
}

TEST_CASE("census snapshots the grouped species view") {
    RunConfig config;
    config.seed = 11;
    config.max_steps = 0;
    Captured out = run("2 * pino<n>(0)[void]", "n = 10", config);
    CHECK(out.census ==
          std::string(kCensusHeader) + "\n" + "1,0,root,pino<n>(0),2\n");
}

TEST_CASE("census cadence skips intermediate steps") {
    RunConfig config;
    config.seed = 11;
    config.max_steps = 10;
    config.census_every = 2;
    Captured out = run("pino<n>(pino<n>(pino<n>(0)))[void]", "n = 10", config);
    REQUIRE(out.results.size() == 1);
    CHECK(out.results[0].steps == 3);
    // Snapshots at step 0 and after step 2 (step 3 is odd, not emitted).
    for (const std::string& row : {std::string("1,0,root,"), std::string("1,")}) {
        CHECK(out.census.find(row) != std::string::npos);
    }
    std::size_t species_rows = count_lines(out.census) - 1;
    CHECK(species_rows >= 2);
}

TEST_CASE("runs are numbered and ordered in the output") {
    RunConfig config;
    config.seed = 21;
    config.runs = 3;
    config.max_steps = 5;
    Captured out = run("pino<n>(0)[void]", "n = 10", config);
    REQUIRE(out.results.size() == 3);
    CHECK(out.results[0].run == 1);
    CHECK(out.results[2].run == 3);
    std::size_t first = out.trace.find("\n1,1,");
    std::size_t second = out.trace.find("\n2,1,");
    std::size_t third = out.trace.find("\n3,1,");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    REQUIRE(third != std::string::npos);
    CHECK(first < second);
    CHECK(second < third);
}

TEST_CASE("distinct runs draw independent times") {
    RunConfig config;
    config.seed = 21;
    config.runs = 2;
    config.max_time = 1e9;
    Captured out = run("pino<n>(0)[void]", "n = 10", config);
    REQUIRE(out.results.size() == 2);
    CHECK(out.results[0].final_time != out.results[1].final_time);
}

TEST_CASE("identical configurations replay byte-identical output") {
    RunConfig config;
    config.seed = 77;
    config.runs = 4;
    config.max_steps = 50;
    config.census_every = 3;
    const char* system = "10 * pino<a>(pino<b>(0))[void] o "
                         "cophago<c>(0)[void] o phago<c>.pino<a>(0)[void]";
    Captured first = run(system, "a = 2\nb = 0.5\nc = 4", config);
    Captured second = run(system, "a = 2\nb = 0.5\nc = 4", config);
    CHECK(first.trace == second.trace);
    CHECK(first.census == second.census);
    CHECK(!first.trace.empty());
    RunConfig reseeded = config;
    reseeded.seed = 78;
    Captured third = run(system, "a = 2\nb = 0.5\nc = 4", reseeded);
    CHECK(first.trace != third.trace);
}

TEST_CASE("trace times are nondecreasing within a run") {
    RunConfig config;
    config.seed = 5;
    config.max_steps = 20;
    Captured out = run("3 * pino<a>(pino<a>(pino<a>(0)))[void]", "a = 1", config);
    std::istringstream in(out.trace);
    std::string line;
    std::getline(in, line);  // header
    double last = 0.0;
    while (std::getline(in, line)) {
        std::size_t a = line.find(',');
        std::size_t b = line.find(',', a + 1);
        std::size_t c = line.find(',', b + 1);
        double t = std::stod(line.substr(b + 1, c - b - 1));
        CHECK(t >= last);
        last = t;
    }
    CHECK(last > 0.0);
}

TEST_CASE("simulation output survives omitted sinks") {
    RunConfig config;
    config.seed = 3;
    config.max_steps = 2;
    auto results = run_simulation(parse_system("pino<n>(0)[void]"), parse_rates("n = 1"),
                                  config, nullptr, nullptr);
    REQUIRE(results.size() == 1);
    CHECK(results[0].steps == 1);
}

TEST_CASE("doubles render at full precision") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.125) == "0.125");
    CHECK(format_double(10000000.0) == "10000000");
    CHECK(format_double(1.0 / 3.0).size() >= 17);
    CHECK(format_compartment(kRoot) == "root");
    CHECK(format_compartment(5) == "c5");
}
