#include "swarmsim/arena.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swarmsim/rng.hpp"

namespace swarmsim {

ArenaPattern generate_pattern(double fill, std::uint64_t seed) {
    if (!(fill >= 0.0 && fill <= 1.0)) {
        throw std::invalid_argument("fill must be in [0, 1]");
    }
    ArenaPattern p;
    p.nominal_fill = fill;
    p.white_count = static_cast<int>(std::llround(fill * ArenaPattern::kTileCount));

    // Fisher-Yates over tile indices; the first white_count slots become white.
    std::array<int, ArenaPattern::kTileCount> order{};
    std::iota(order.begin(), order.end(), 0);
    RngStream rng = derive_stream(seed, streams::kArena);
    for (int i = 0; i < ArenaPattern::kTileCount - 1; ++i) {
        int j = i + static_cast<int>(rng.uniform_below(ArenaPattern::kTileCount - i));
        std::swap(order[i], order[j]);
    }
    for (int k = 0; k < p.white_count; ++k) {
        p.tiles[order[k]] = 1;
    }
    return p;
}

int tile_index(double coord) {
    int idx = static_cast<int>(std::floor(coord / ArenaPattern::kTileM));
    return std::clamp(idx, 0, ArenaPattern::kTilesPerSide - 1);
}

int color_at(const ArenaPattern& pattern, double x, double y) {
    return pattern.at(tile_index(x), tile_index(y));
}

std::string pattern_to_text(const ArenaPattern& pattern) {
    std::string out;
    out.reserve(ArenaPattern::kTileCount + ArenaPattern::kTilesPerSide);
    for (int iy = 0; iy < ArenaPattern::kTilesPerSide; ++iy) {
        for (int ix = 0; ix < ArenaPattern::kTilesPerSide; ++ix) {
            out.push_back(pattern.at(ix, iy) ? '1' : '0');
        }
        out.push_back('\n');
    }
    return out;
}

ArenaPattern pattern_from_text(const std::string& text) {
    ArenaPattern p;
    int n = 0;
    for (char c : text) {
        if (c == '0' || c == '1') {
            if (n >= ArenaPattern::kTileCount) {
                throw std::invalid_argument("pattern text has more than 256 tiles");
            }
            p.tiles[n++] = (c == '1') ? 1 : 0;
        } else if (c != '\n' && c != '\r' && c != ' ') {
            throw std::invalid_argument("pattern text contains invalid character");
        }
    }
    if (n != ArenaPattern::kTileCount) {
        throw std::invalid_argument("pattern text must contain exactly 256 tiles");
    }
    p.white_count = static_cast<int>(std::count(p.tiles.begin(), p.tiles.end(), 1));
    p.nominal_fill = p.actual_fill();
    return p;
}

}  // namespace swarmsim
