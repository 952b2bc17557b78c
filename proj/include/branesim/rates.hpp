// ============================================================================
// rates.hpp — per-channel rate constants
// ============================================================================
//
// Rates file format, one binding per line:
//
//   # comment
//   n = 10
//   m = 0.5
//   default = 1.0     # applies to channels without an explicit line
//
// Values are positive decimals, parsed exactly into rationals. Channels with
// no binding use the default (1 unless overridden).
//
// ============================================================================

#pragma once

#include "branesim/ast.hpp"
#include "branesim/numeric.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace brane {

struct RatesError : std::runtime_error {
    int line;
    RatesError(int line_, const std::string& message)
        : std::runtime_error(message), line(line_) {}
};

class RateTable {
  public:
    RateTable() : fallback_(1) {}

    void set(const Name& channel, Rational rate) { by_channel_[channel] = std::move(rate); }
    void set_default(Rational rate) { fallback_ = std::move(rate); }

    const Rational& rate(const Name& channel) const {
        auto it = by_channel_.find(channel);
        return it != by_channel_.end() ? it->second : fallback_;
    }
    double rate_double(const Name& channel) const { return to_double(rate(channel)); }

  private:
    Rational fallback_;
    std::map<Name, Rational> by_channel_;
};

// Throws RatesError on malformed lines or nonpositive rates.
RateTable parse_rates(const std::string& text);

}  // namespace brane
