#pragma once

#include <cstdint>

#include "rgp/raster.hpp"

namespace rgp::synth {

/// Deterministic fundus-like test image: a warm-toned disk on a black
/// background, a few dark vessel strokes, and `severity` * 3 bright
/// lesion blobs (severity 0..3). Everything derives from the seed, so
/// identical calls produce identical pixels. Intended for fixtures and
/// demos, not for anything clinical.
RasterImage fundus_image(uint64_t seed, int severity, int width = 160,
                         int height = 140);

} // namespace rgp::synth
