#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtbn/deploy.hpp"
#include "mtbn/network.hpp"

namespace mtbn {

/// "VAR@T=value", or "VAR=value" for an unstamped instance.
struct Literal {
    Instance instance;
    std::string value;

    std::string to_string() const { return instance.name() + "=" + value; }
    bool operator==(const Literal&) const = default;
};

/// Throws ModelError on malformed text.
Literal parse_literal(std::string_view text);
/// Comma-separated list; empty text gives an empty list.
std::vector<Literal> parse_literals(std::string_view text);

/// (instance index, value index) pairs, sorted by instance, no duplicates.
using Assignment = std::vector<std::pair<std::size_t, int>>;

/// Resolves literals against a network. Throws UnknownInstanceError for
/// undeployed instances, ModelError for values outside the domain and
/// ZeroEvidenceError for contradictory literals.
Assignment resolve(const Network& net, const std::vector<Literal>& literals);

}  // namespace mtbn
