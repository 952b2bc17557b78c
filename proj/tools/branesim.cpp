// ============================================================================
// branesim — stochastic simulator, reference-semantics inspector, and
// property-test driver for membrane systems
// ============================================================================
//
//   branesim run      --input F --rates F --seed N [--max-time X]
//                     [--max-steps N] [--runs N] [--trace out.csv]
//                     [--census out.csv --census-every K] [--normalize]
//   branesim oracle   --input F --rates F
//   branesim check    --input F
//   branesim adequacy [--cases N] [--seed S] [--max-depth D] [--float]
//
// Exit codes: 0 success, 1 parse error, 2 malformed rates,
//             3 internal invariant violation (with state dump).
//
// ============================================================================

#include "CLI11.hpp"

#include "branesim/adequacy.hpp"
#include "branesim/machine.hpp"
#include "branesim/measure.hpp"
#include "branesim/parse.hpp"
#include "branesim/rates.hpp"
#include "branesim/simulate.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace brane;

constexpr int kExitParse = 1;
constexpr int kExitRates = 2;
constexpr int kExitMachine = 3;

std::string read_file(const std::string& path, int failure_code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        std::exit(failure_code);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SystemPtr load_system(const std::string& path) {
    std::string text = read_file(path, kExitParse);
    try {
        return parse_system(text);
    } catch (const ParseError& e) {
        std::cerr << path << ":" << e.line << ":" << e.column << ": error: " << e.what()
                  << "\n";
        std::exit(kExitParse);
    }
}

RateTable load_rates(const std::string& path) {
    std::string text = read_file(path, kExitRates);
    try {
        return parse_rates(text);
    } catch (const RatesError& e) {
        std::cerr << path << ":" << e.line << ": error: " << e.what() << "\n";
        std::exit(kExitRates);
    }
}

// One measure row: label, channel, membrane components in parentheses,
// system components in brackets, exact rate.
std::string format_measure_row(const oracle::SystemKey& key, const Rational& rate) {
    std::ostringstream os;
    os << oracle::to_label_name(key.label);
    if (key.label != oracle::Label::Id) os << "<" << key.channel << ">";
    os << " ->";
    for (const auto& m : key.mems) os << " (" << to_string(m) << ")";
    for (const auto& s : key.syss) os << " [" << to_string(s) << "]";
    os << " : " << to_string(rate);
    return os.str();
}

int cmd_run(const std::string& input_path, const std::string& rates_path,
            const sim::RunConfig& base, const std::string& trace_path,
            const std::string& census_path) {
    SystemPtr P = load_system(input_path);
    RateTable rates = load_rates(rates_path);

    sim::RunConfig config = base;
    config.want_trace = !trace_path.empty();
    config.want_census = !census_path.empty();

    std::ofstream trace_file, census_file;
    std::ostream* trace = nullptr;
    std::ostream* census = nullptr;
    if (config.want_trace) {
        trace_file.open(trace_path, std::ios::binary | std::ios::trunc);
        if (!trace_file) {
            std::cerr << "error: cannot write '" << trace_path << "'\n";
            return kExitParse;
        }
        trace = &trace_file;
    }
    if (config.want_census) {
        census_file.open(census_path, std::ios::binary | std::ios::trunc);
        if (!census_file) {
            std::cerr << "error: cannot write '" << census_path << "'\n";
            return kExitParse;
        }
        census = &census_file;
    }

    try {
        auto results = sim::run_simulation(P, rates, config, trace, census);
        for (const auto& r : results) {
            std::cout << "run " << r.run << ": " << r.steps << " steps, final time "
                      << sim::format_double(r.final_time)
                      << (r.deadlocked ? " (no enabled reaction)" : "") << "\n";
        }
    } catch (const sim::MachineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMachine;
    }
    return 0;
}

int cmd_oracle(const std::string& input_path, const std::string& rates_path) {
    SystemPtr P = load_system(input_path);
    RateTable rates = load_rates(rates_path);
    oracle::SystemMeasure table = oracle::measure_system(P, rates);
    for (const auto& [key, rate] : table)
        std::cout << format_measure_row(key, rate) << "\n";
    return 0;
}

int cmd_check(const std::string& input_path) {
    SystemPtr P = load_system(input_path);
    std::cout << to_string(canonical_system(P)) << "\n";
    return 0;
}

int cmd_adequacy(std::uint64_t seed, std::size_t cases, int max_depth, bool float_mode) {
    adequacy::GeneratorConfig cfg;
    cfg.max_depth = max_depth;
    adequacy::CheckOptions options;
    options.float_mode = float_mode;
    adequacy::SuiteResult result = adequacy::run_suite(seed, cases, cfg, options);
    if (result.failure) {
        std::cerr << "counterexample (shrunk):\n"
                  << "  system: " << to_string(result.failure->system) << "\n"
                  << "  detail: " << result.failure->detail << "\n";
        return 1;
    }
    std::cout << "adequacy: " << result.cases << " cases, no counterexample\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic membrane-system simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "simulate a system");
    std::string run_input, run_rates, trace_path, census_path;
    sim::RunConfig config;
    double max_time = 0;
    std::uint64_t max_steps = 0;
    run->add_option("--input", run_input, "system file")->required();
    run->add_option("--rates", run_rates, "rates file")->required();
    run->add_option("--seed", config.seed, "master seed")->required();
    auto* time_opt = run->add_option("--max-time", max_time, "stop at simulated time");
    auto* steps_opt = run->add_option("--max-steps", max_steps, "stop after N reactions");
    run->add_option("--runs", config.runs, "number of independent runs")
        ->check(CLI::PositiveNumber);
    run->add_option("--trace", trace_path, "write per-reaction CSV");
    run->add_option("--census", census_path, "write species-count CSV");
    run->add_option("--census-every", config.census_every, "census cadence in steps")
        ->check(CLI::PositiveNumber);
    run->add_flag("--normalize", config.normalize, "merge congruent species after steps");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "print the reference rate table");
    std::string oracle_input, oracle_rates;
    oracle_cmd->add_option("--input", oracle_input, "system file")->required();
    oracle_cmd->add_option("--rates", oracle_rates, "rates file")->required();

    // check
    auto* check_cmd = app.add_subcommand("check", "parse and print the canonical form");
    std::string check_input;
    check_cmd->add_option("--input", check_input, "system file")->required();

    // adequacy
    auto* adequacy_cmd =
        app.add_subcommand("adequacy", "randomized machine-vs-reference property tests");
    std::uint64_t adequacy_seed = 1;
    std::size_t adequacy_cases = 1000;
    int adequacy_depth = 3;
    bool adequacy_float = false;
    adequacy_cmd->add_option("--cases", adequacy_cases, "number of generated systems");
    adequacy_cmd->add_option("--seed", adequacy_seed, "generator seed");
    adequacy_cmd->add_option("--max-depth", adequacy_depth, "maximum cell nesting")
        ->check(CLI::Range(0, 6));
    adequacy_cmd->add_flag("--float", adequacy_float,
                           "compare double propensities at 1e-9 relative tolerance");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (time_opt->count() == 0 && steps_opt->count() == 0) {
            std::cerr << "error: at least one of --max-time/--max-steps is required\n";
            return kExitParse;
        }
        if (time_opt->count() > 0) config.max_time = max_time;
        if (steps_opt->count() > 0) config.max_steps = max_steps;
        return cmd_run(run_input, run_rates, config, trace_path, census_path);
    }
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_input, oracle_rates);
    if (check_cmd->parsed()) return cmd_check(check_input);
    if (adequacy_cmd->parsed())
        return cmd_adequacy(adequacy_seed, adequacy_cases, adequacy_depth, adequacy_float);
    return 0;
}
