#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rgp/error.hpp"

namespace rgp {

enum class ColorSpace { RGB, YCbCr, Gray };

const char* to_string(ColorSpace cs);

/// 8-bit raster image, row-major, channel-interleaved.
/// Gray images carry 1 channel; RGB and YCbCr carry 3.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    ColorSpace colorspace = ColorSpace::Gray;
    std::vector<uint8_t> data;

    static RasterImage make(int w, int h, ColorSpace cs, uint8_t fill = 0);

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    uint8_t at(int x, int y, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t& at(int x, int y, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    /// Enforce the structural invariants (size/channels/colorspace
    /// agreement); throws on violation.
    void validate() const;
};

/// 256-bin intensity histogram of an 8-bit single-channel image.
struct Histogram256 {
    std::array<uint64_t, 256> bins{};

    uint64_t total() const {
        uint64_t t = 0;
        for (uint64_t b : bins) t += b;
        return t;
    }
};

} // namespace rgp
