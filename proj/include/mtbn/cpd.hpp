#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mtbn/diagnostics.hpp"
#include "mtbn/network.hpp"
#include "mtbn/structure.hpp"

namespace mtbn {

inline constexpr double kNormalizationTolerance = 1e-9;

/// Row matching the active parents of `x` under `s`. `values` supplies the
/// parent values; entries for structural instances are taken from `s`.
/// Throws MissingRowError naming the unmatched key.
const std::vector<double>& lookup_distribution(const Network& net, const Structure& s, std::size_t x,
                                               std::span<const int> values);

/// Same, addressed by instance and label.
const std::vector<double>& lookup_distribution(const Network& net, const Structure& s, const Instance& x,
                                               const std::map<Instance, std::string>& parent_values);

/// Every context key some instance of `variable` can realize, sorted.
std::vector<ContextKey> reachable_contexts(const Network& net, std::string_view variable);

/// Missing tables and rows, unreachable rows (warnings), malformed and
/// non-normalized distributions.
ValidationReport validate_cpds(const Network& net);

/// Builds a table for `variable` with one row per reachable context. A
/// nullopt from `fn` leaves the row out.
CpdTable generate_cpd(const Network& net, std::string_view variable,
                      const std::function<std::optional<std::vector<double>>(const ContextKey&)>& fn);

std::vector<double> point_mass(std::size_t size, std::size_t at);
std::vector<double> uniform(std::size_t size);

}  // namespace mtbn
