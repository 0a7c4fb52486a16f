#pragma once

// Brute-force reference evaluator. Works from the condensed model alone:
// it unrolls instances itself and multiplies table rows by the chain rule,
// without touching deployment, compiled CPDs or the inference code.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtbn/model.hpp"

namespace oracle {

struct Inst {
    std::string var;
    std::optional<int> stamp;
    std::vector<std::string> labels;
    int fixed = -1;  // constant structural value

    std::string name() const { return stamp ? var + "@" + std::to_string(*stamp) : var; }
};

using Literals = std::vector<std::pair<std::string, std::string>>;

class BruteForce {
public:
    explicit BruteForce(mtbn::CondensedModel model);

    const std::vector<Inst>& instances() const { return inst_; }
    int index(const std::string& name) const;
    int value(int x, const std::string& label) const;

    // Chain-rule product. Throws std::runtime_error if a cyclic structure gets
    // nonzero mass or a needed row is missing.
    double joint(const std::vector<int>& values) const;

    // Calls fn on every assignment with nonzero constant parts.
    void for_each(const std::function<void(const std::vector<int>&)>& fn) const;

    double probability(const Literals& literals) const;
    double conditional(const Literals& target, const Literals& evidence) const;

private:
    struct Parent {
        int parent;
        int mechanism;
        int lag;
        int lag_value;
        mtbn::ContextEntry slot;  // value left empty
    };

    bool acyclic(const std::vector<int>& values) const;
    std::vector<const Parent*> active(int x, const std::vector<int>& values) const;

    mtbn::CondensedModel model_;
    std::vector<Inst> inst_;
    std::vector<std::vector<Parent>> parents_;
    std::map<std::string, int> by_name_;
};

}  // namespace oracle
