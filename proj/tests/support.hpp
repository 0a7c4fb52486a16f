#pragma once

#include <string>

#include "mtbn/model.hpp"
#include "mtbn/query.hpp"

inline std::string model_path(const std::string& file) { return std::string(MTBN_MODELS_DIR) + "/" + file; }

inline mtbn::CondensedModel fixture(const std::string& file) { return mtbn::load_model(model_path(file)); }

#include <functional>
#include <span>
#include <vector>

#include "mtbn/network.hpp"
#include "mtbn/structure.hpp"
#include "oracle.hpp"

// Visits every full assignment of `net` with constant structural instances
// held at their fixed values.
inline void for_each_full(const mtbn::Network& net, const std::function<void(std::span<const int>)>& fn) {
    auto values = mtbn::constant_structural_values(net);
    std::vector<std::size_t> free;
    for (std::size_t x = 0; x < net.size(); ++x)
        if (values[x] < 0) {
            values[x] = 0;
            free.push_back(x);
        }
    while (true) {
        fn(values);
        std::size_t k = free.size();
        while (k > 0) {
            auto x = free[k - 1];
            if (++values[x] < static_cast<int>(net.domain_size(x))) break;
            values[x] = 0;
            --k;
        }
        if (k == 0) return;
    }
}

// Same assignment in the oracle's instance layout, matched by name and label.
inline std::vector<int> to_oracle(const mtbn::Network& net, const oracle::BruteForce& bf, std::span<const int> values) {
    std::vector<int> out(bf.instances().size(), -1);
    for (std::size_t x = 0; x < net.size(); ++x) {
        int o = bf.index(net.instance_name(x));
        out[static_cast<std::size_t>(o)] =
            bf.value(o, net.variable_of(x).labels[static_cast<std::size_t>(values[x])]);
    }
    return out;
}

inline oracle::Literals literals_of(const std::vector<mtbn::Literal>& lits) {
    oracle::Literals out;
    for (const auto& l : lits) out.push_back({l.instance.name(), l.value});
    return out;
}
