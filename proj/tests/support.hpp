#pragma once

#include <map>
#include <memory>
#include <string>

#include "neumag/model_operators.hpp"
#include "neumag/montgomery_table.hpp"
#include "neumag/surface_geometry.hpp"

namespace test_support {

// Model constants at N = 4000 with Richardson over (N, 2N), from the
// minimization oracle. Frozen so the downstream suites stay fast.
inline neumag::model::ModelConstants frozen_constants() {
    neumag::model::ModelConstants c;
    c.theta0 = 0.590106124953505;
    c.xi0 = 0.768183653130996;
    c.alpha0 = 0.585512898952850;
    c.theta0_m2 = 0.569820317441690;
    c.xi0_m2 = 0.346758403749254;
    c.curv_m2 = 1.576126890979900;
    return c;
}

inline std::shared_ptr<const neumag::model::MontgomeryTable> shared_table() {
    static const auto table =
        std::make_shared<const neumag::model::MontgomeryTable>(neumag::model::MontgomeryTable::build(-6.5, 6.5));
    return table;
}

inline const neumag::geometry::GammaFrame& frame_for(const std::string& preset, int n = 257) {
    static std::map<std::pair<std::string, int>, neumag::geometry::GammaFrame> cache;
    const auto key = std::make_pair(preset, n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache
                 .emplace(key, neumag::geometry::gamma_frame(neumag::geometry::Surface::preset(preset), n,
                                                             frozen_constants().alpha0))
                 .first;
    }
    return it->second;
}

}  // namespace test_support
