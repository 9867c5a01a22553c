#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "swarmsim/engine.hpp"

namespace swarmsim {

struct Preset {
    std::string_view name;
    int tau;
    int s;
    int d;
    int h;
};

// empirical is the hand-tuned operating point; the optimized_* sets came out
// of PSO campaigns without and with positive feedback.
inline constexpr std::array<Preset, 3> kPresets{{
    {"empirical", 282, 564, 50, 0},
    {"optimized_uminus", 56, 178, 29, 17},
    {"optimized_uplus", 57, 912, 51, 10},
}};

inline std::optional<Preset> find_preset(std::string_view name) {
    for (const Preset& p : kPresets) {
        if (p.name == name) return p;
    }
    return std::nullopt;
}

inline void apply_preset(const Preset& p, ParameterSet& params) {
    params.tau = p.tau;
    params.s = p.s;
    params.d = p.d;
    params.h = p.h;
}

}  // namespace swarmsim
