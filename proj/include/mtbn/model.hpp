#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtbn {

inline constexpr std::string_view kActive = "active";
inline constexpr std::string_view kInactive = "inactive";
inline constexpr std::string_view kUnset = "unset";

enum class Temporality { indexed, abstract };

// constant_inactive is never authored by hand; apply_intervention produces it.
enum class Constancy { constant_active, dynamic, constant_inactive };

/// How a context entry locates its parent instance relative to the child:
/// `lag` is child stamp minus parent stamp (0 when either side is abstract),
/// `at` is the parent's absolute stamp, used when the child is abstract.
enum class ContextTag { lag, at };

std::string mechanism_name(std::string_view cause, std::string_view effect);
std::string lag_name(std::string_view mechanism);

/// Which manipulation options a gate variable leaves open, per gate value.
struct Availability {
    std::string gate;
    std::map<std::string, std::vector<std::string>> allowed;

    bool operator==(const Availability&) const = default;
};

struct OrdinaryVariable {
    std::string name;
    std::vector<std::string> domain;
    Temporality temporality = Temporality::indexed;
    // Set on manipulation dummies: the variable this dummy clamps.
    std::optional<std::string> manipulates;
    std::optional<Availability> availability;

    bool operator==(const OrdinaryVariable&) const = default;
};

struct MechanismVariable {
    std::string cause;
    std::string effect;
    Constancy constancy = Constancy::constant_active;

    std::string name() const { return mechanism_name(cause, effect); }
    bool operator==(const MechanismVariable&) const = default;
};

struct LagVariable {
    std::string mechanism;
    std::vector<int> values;
    bool constant = false;

    std::string name() const { return lag_name(mechanism); }
    bool operator==(const LagVariable&) const = default;
};

struct TemporalRange {
    int t1 = 1;
    int tn = 1;

    int length() const { return tn - t1 + 1; }
    bool contains(int t) const { return t >= t1 && t <= tn; }
    bool operator==(const TemporalRange&) const = default;
};

struct Granularity {
    std::string unit_label;

    bool operator==(const Granularity&) const = default;
};

struct ContextEntry {
    std::string parent;
    ContextTag tag = ContextTag::lag;
    int offset = 0;
    std::string value;

    auto operator<=>(const ContextEntry&) const = default;
};

/// Realized active parents and their values. Entries are kept sorted, so two
/// keys naming the same parents compare equal regardless of authoring order.
/// An empty key is the boundary ("no information") key.
class ContextKey {
public:
    ContextKey() = default;
    explicit ContextKey(std::vector<ContextEntry> entries);

    static ContextKey boundary() { return {}; }

    bool is_boundary() const { return entries_.empty(); }
    const std::vector<ContextEntry>& entries() const { return entries_; }
    std::string to_string() const;

    auto operator<=>(const ContextKey&) const = default;

private:
    std::vector<ContextEntry> entries_;
};

struct CpdRow {
    ContextKey context;
    std::vector<double> probabilities;

    bool operator==(const CpdRow&) const = default;
};

/// One generalized-temporal table: the same rows apply at every stamp.
struct CpdTable {
    std::string variable;
    std::vector<CpdRow> rows;

    const CpdRow* find(const ContextKey& key) const;
    bool operator==(const CpdTable&) const = default;
};

/// Declared association between two ordinary variables with no causal reading.
struct NoncausalArc {
    std::string a;
    std::string b;
    std::vector<std::vector<double>> joint_table;
    std::optional<double> strength_a;
    std::optional<double> strength_b;

    bool operator==(const NoncausalArc&) const = default;
};

struct CondensedModel {
    TemporalRange range;
    Granularity granularity;
    std::vector<OrdinaryVariable> variables;
    std::vector<MechanismVariable> mechanisms;
    std::vector<LagVariable> lags;
    std::vector<CpdTable> cpds;
    std::vector<NoncausalArc> noncausal;

    const OrdinaryVariable* find_variable(std::string_view name) const;
    const MechanismVariable* find_mechanism(std::string_view name) const;
    const LagVariable* find_lag_of(std::string_view mechanism) const;
    const CpdTable* find_cpd(std::string_view variable) const;
    CpdTable* find_cpd(std::string_view variable);

    bool operator==(const CondensedModel&) const = default;
};

/// Parses a model file. Throws ParseError on malformed JSON and ModelError on
/// schema violations, duplicate names and dangling references.
CondensedModel parse_model(std::string_view text);
CondensedModel load_model(const std::filesystem::path& path);

std::string serialize_model(const CondensedModel& model);
void save_model(const CondensedModel& model, const std::filesystem::path& path);

/// Same model over a different temporal range. Tables are generalized
/// temporal, so nothing else changes.
CondensedModel with_range(CondensedModel model, int t1, int tn);

enum class StructuralKind { mechanism, lag };

struct StructuralVariable {
    std::string name;
    StructuralKind kind;
    bool constant;

    bool operator==(const StructuralVariable&) const = default;
};

/// S = E u L ordered by canonical name. Constant members are flagged so
/// enumeration can skip them.
std::vector<StructuralVariable> structural_variable_set(const CondensedModel& model);

}  // namespace mtbn
