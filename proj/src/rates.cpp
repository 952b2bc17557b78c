#include "branesim/rates.hpp"

#include <cctype>
#include <sstream>

namespace brane {

bool parse_decimal_rational(const std::string& text, Rational& out) {
    std::size_t i = 0;
    auto digits = [&](std::string& into) {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            into += text[i++];
        return i > start;
    };
    if (i < text.size() && text[i] == '+') ++i;
    std::string whole, frac;
    bool has_whole = digits(whole);
    bool has_frac = false;
    if (i < text.size() && text[i] == '.') {
        ++i;
        has_frac = digits(frac);
    }
    if (!has_whole && !has_frac) return false;
    long long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
        std::string es;
        if (!digits(es) || es.size() > 9) return false;
        exp10 = std::stoll(es);
        if (neg) exp10 = -exp10;
    }
    if (i != text.size()) return false;

    Count numerator(whole.empty() ? "0" : whole);
    Count denominator = 1;
    for (char c : frac) {
        numerator = numerator * 10 + (c - '0');
        denominator *= 10;
    }
    Count scale = 1;
    for (long long k = 0; k < (exp10 < 0 ? -exp10 : exp10); ++k) scale *= 10;
    if (exp10 >= 0)
        out = Rational(numerator * scale, denominator);
    else
        out = Rational(numerator, denominator * scale);
    return true;
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1)
        os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

RateTable parse_rates(const std::string& text) {
    RateTable table;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        std::size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw RatesError(line_no, "expected 'name = rate'");
        std::string name = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (name.empty()) throw RatesError(line_no, "missing channel name");
        for (char c : name)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw RatesError(line_no, "invalid channel name '" + name + "'");
        Rational rate;
        if (!parse_decimal_rational(value, rate))
            throw RatesError(line_no, "invalid rate value '" + value + "'");
        if (rate <= 0)
            throw RatesError(line_no, "rates must be positive, got '" + value + "'");
        if (name == "default")
            table.set_default(std::move(rate));
        else
            table.set(name, std::move(rate));
    }
    return table;
}

}  // namespace brane
