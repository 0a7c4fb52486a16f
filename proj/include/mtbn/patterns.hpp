#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtbn/model.hpp"
#include "mtbn/query.hpp"

namespace mtbn {

// Intervals -----------------------------------------------------------------

struct IntervalSpec {
    std::string start;
    std::string end;
    std::string duration;
    std::vector<int> points;
};

struct IntervalBuild {
    CondensedModel model;
    IntervalSpec spec;
};

/// Adds abstract NAME_START, NAME_END and NAME_DUR over `points`. END given
/// START is uniform over the points not before START; DUR = END - START.
/// An empty `start_prior` means uniform.
IntervalBuild make_interval(const CondensedModel& m, std::string_view name, std::vector<int> points,
                            const std::vector<double>& start_prior = {});

enum class IntervalRelation { before, after, coincides, meets, follows, overlaps, is_overlapped_by };

std::string relation_name(IntervalRelation r);
const std::vector<IntervalRelation>& all_relations();

/// Classifies entity 1 = [s1, e1] against entity 2 = [s2, e2]. Points have
/// start == end. Throws ModelError when a start exceeds its end.
IntervalRelation interval_relation_value(int s1, int e1, int s2, int e2);

/// Adds an abstract relation variable with a deterministic CPD over the
/// endpoint variables of two intervals.
CondensedModel make_interval_relation(const CondensedModel& m, std::string_view name, const IntervalSpec& first,
                                      const IntervalSpec& second);

// Abstractions --------------------------------------------------------------

/// Source instance name ("G@2", or "A" for an abstract source) to value label.
using SourceValues = std::map<std::string, std::string>;
using AbstractionPredicate = std::function<std::string(const SourceValues&)>;

/// Adds an abstract variable `name` over `domain`, caused by every variable in
/// `sources` through constant-active, lag-0 mechanisms. Its CPD is the point
/// mass on predicate(source values). Throws ModelError when the predicate
/// returns a label outside `domain` for some combination.
CondensedModel make_abstraction(const CondensedModel& m, std::string_view name, std::vector<std::string> domain,
                                const std::vector<std::string>& sources, const AbstractionPredicate& predicate);

// Manipulation --------------------------------------------------------------

std::string manipulation_name(std::string_view target);

/// Adds TARGET_MANIP with the target's domain plus "unset". While unset the
/// target keeps its original rows; otherwise it is clamped to the dummy value.
CondensedModel make_manipulation(const CondensedModel& m, std::string_view target,
                                 const std::optional<Availability>& availability = std::nullopt);

struct Intervention {
    CondensedModel model;
    // Dummy instances clamped to the bound values, to be added to evidence.
    std::vector<Literal> clamp;
};

/// Each binding is (target or dummy name, value). The target's other incoming
/// mechanisms become constant-inactive and the dummy is clamped at every
/// deployed instance.
Intervention apply_intervention(const CondensedModel& m, const std::vector<std::pair<std::string, std::string>>& bindings);

// Non-causal associations ---------------------------------------------------

std::string hidden_name(std::string_view a, std::string_view b);

/// Replaces every declared non-causal arc by a hidden common cause whose
/// prior is the declared joint table.
CondensedModel transform_noncausal(const CondensedModel& m);

}  // namespace mtbn
