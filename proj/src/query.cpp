#include "mtbn/query.hpp"

#include <algorithm>

#include "mtbn/error.hpp"

namespace mtbn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

Literal parse_literal(std::string_view text) {
    text = trim(text);
    // Mechanism names contain "->", so split on the last '='.
    const auto eq = text.rfind('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size())
        throw ModelError("malformed proposition '" + std::string(text) + "': expected VAR@T=value");
    auto lhs = trim(text.substr(0, eq));
    auto rhs = trim(text.substr(eq + 1));
    if (lhs.empty() || rhs.empty())
        throw ModelError("malformed proposition '" + std::string(text) + "': expected VAR@T=value");
    return {parse_instance(lhs), std::string(rhs)};
}

std::vector<Literal> parse_literals(std::string_view text) {
    std::vector<Literal> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_literal(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Assignment resolve(const Network& net, const std::vector<Literal>& literals) {
    Assignment out;
    for (const auto& lit : literals) {
        const auto x = net.index_of(lit.instance);
        const int v = net.value_index(x, lit.value);
        if (v < 0) throw ModelError("'" + lit.value + "' is not a value of " + lit.instance.name());
        out.push_back({x, v});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].first == out[i - 1].first)
            throw ZeroEvidenceError("contradictory values given for " + net.instance_name(out[i].first));
    return out;
}

}  // namespace mtbn
