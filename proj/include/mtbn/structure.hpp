#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtbn/diagnostics.hpp"
#include "mtbn/network.hpp"

namespace mtbn {

/// One joint instantiation of the structural instances. `values` is indexed
/// by instance and holds -1 for ordinary instances.
struct Structure {
    std::uint64_t index = 0;
    std::vector<int> values;

    int value(std::size_t x) const { return values[x]; }
};

/// Values of the constant structural instances; -1 everywhere else.
std::vector<int> constant_structural_values(const Network& net);

/// Number of structures, saturating at UINT64_MAX.
std::uint64_t structure_count(const Network& net);

/// Decodes an enumeration index. Free structural instances are taken in
/// (name, stamp) order with the first one most significant.
Structure structure_at(const Network& net, std::uint64_t index);

/// Lazy enumeration in index order. Never materializes the full list.
class StructureCursor {
public:
    explicit StructureCursor(const Network& net);

    /// Advances to the next structure; false once exhausted. The first call
    /// yields structure 0.
    bool next();
    const Structure& current() const { return current_; }

private:
    const Network* net_;
    Structure current_;
    bool started_ = false;
    bool done_ = false;
};

/// Restriction of a structure to the instances with one stamp. Unstamped
/// instances form their own substructure.
struct Substructure {
    std::optional<int> stamp;
    std::vector<std::size_t> instances;
};

std::vector<Substructure> substructures(const Network& net, const Structure& s);

std::vector<std::size_t> active_parents(const Network& net, const Structure& s, std::size_t x);
/// Throws UnknownInstanceError.
std::vector<Instance> active_parents(const Network& net, const Structure& s, const Instance& x);

/// Active edges only; structural instances take part as ordinary nodes.
bool is_acyclic(const Network& net, const Structure& s);

/// Iterated peeling of instances whose active parents are already placed;
/// ties go to the lower instance index. Throws CyclicStructureError.
std::vector<std::size_t> ancestral_ordering(const Network& net, const Structure& s);

/// Same peeling over any value vector that assigns every structural
/// instance; nullopt when the active edges contain a cycle. With `subset`,
/// only those instances are ordered; the subset must be closed under
/// parents and gating instances, and values outside it are ignored.
std::optional<std::vector<std::size_t>> try_ancestral_ordering(const Network& net, std::span<const int> values,
                                                               const std::vector<bool>* subset = nullptr);

/// True iff every listed instance appears once and after all its active
/// parents. Constant structural instances may be left out; every other
/// instance must be present.
bool is_ancestral_ordering(const Network& net, const Structure& s, std::span<const std::size_t> ordering);

/// A structural instance whose value in `s` has probability 0 in every
/// context consistent with `s`, if any.
struct ZeroWitness {
    std::size_t instance;
    int value;
};

std::optional<ZeroWitness> find_zero_witness(const Network& net, std::span<const int> structural_values);

struct CyclicFamily {
    // Values of the free structural instances gating edges inside a cycle.
    std::vector<std::pair<std::size_t, int>> assignment;
    std::optional<ZeroWitness> witness;
    // Set when a witness exists here or in every completion of the family.
    bool certified = false;
};

struct CertificationReport {
    bool certified = false;
    // Candidate-edge graph has no cycle at all, so no structure can be cyclic.
    bool trivially_acyclic = false;
    std::vector<CyclicFamily> families;
    ValidationReport diagnostics;
};

inline constexpr std::uint64_t kDefaultCertificationCap = 1u << 20;

CertificationReport check_well_defined(const Network& net, std::uint64_t cap = kDefaultCertificationCap);

std::string format_certification(const Network& net, const CertificationReport& report);

}  // namespace mtbn
