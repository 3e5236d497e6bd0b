#pragma once

#include <cstdint>

#include "pointvec/image.hpp"
#include "pointvec/types.hpp"

namespace pv {

// Deterministic 64-bit generator; one instance per independent stream.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)
    int next_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

enum class SceneGesture { pointing, palm, fist };

struct SceneSpec {
    SceneGesture gesture = SceneGesture::pointing;
    double angle_deg = 45.0;    // pointing direction, degrees counterclockwise, y up
    std::uint64_t seed = 1;     // pose, scale, and pixel jitter
    std::uint64_t bg_seed = 1;  // background texture (shared across scenes that reuse a room)
    int width = 640;
    int height = 480;
    int brightness = 0;         // uniform offset added to every channel, clamped
};

struct SceneTruth {
    bool pointing = false;
    double angle_deg = 0.0;
    PointI fingertip;  // extremal hand pixel along the pointing direction
    Rect face;         // tight bounding box of the rendered face ellipse
};

struct SyntheticScene {
    Frame frame;
    SceneTruth truth;
};

// Textured static backdrop: brightness gradient, a few muted furniture
// rectangles, and per-pixel speckle. Deterministic in (bg_seed, dims).
Frame synth_background(std::uint64_t bg_seed, int width, int height, int brightness);

// Background plus a sleeved arm, a skin-toned face with a brighter forehead
// band, and one hand posed as requested. Deterministic in its argument.
SyntheticScene synth_scene(const SceneSpec& spec);

// Every channel shifted by delta and clamped to [0,255].
Frame shift_brightness(const Frame& f, int delta);

}  // namespace pv
