#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace swarmsim {

// Square arena tiled with a 16x16 binary pattern. 0 = black, 1 = white.
// Immutable after generation and safe to share across parallel simulations.
struct ArenaPattern {
    static constexpr int kTilesPerSide = 16;
    static constexpr int kTileCount = kTilesPerSide * kTilesPerSide;
    static constexpr double kSideM = 1.0;
    static constexpr double kTileM = kSideM / kTilesPerSide;  // 0.0625 m

    std::array<std::uint8_t, kTileCount> tiles{};  // row-major, index = iy*16 + ix
    double nominal_fill = 0.0;
    int white_count = 0;

    std::uint8_t at(int ix, int iy) const { return tiles[iy * kTilesPerSide + ix]; }
    double actual_fill() const { return static_cast<double>(white_count) / kTileCount; }
    // Ground-truth label: white majority iff more than half the tiles are white.
    bool truth_white_majority() const { return 2 * white_count > kTileCount; }
};

// Places exactly round(fill * 256) white tiles uniformly at random.
// Identical (fill, seed) pairs produce identical patterns.
// Throws std::invalid_argument for fill outside [0, 1].
ArenaPattern generate_pattern(double fill, std::uint64_t seed);

// Color of the tile containing (x, y), both in [0, side]. Tile index is
// floor(coord / tile_side), clamped to 15 at the far edge, so an interior
// tile boundary belongs to the higher-index tile.
int color_at(const ArenaPattern& pattern, double x, double y);

int tile_index(double coord);

// 16 lines of 16 '0'/'1' characters, row iy = 0 first.
std::string pattern_to_text(const ArenaPattern& pattern);
ArenaPattern pattern_from_text(const std::string& text);

}  // namespace swarmsim
