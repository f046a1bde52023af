#pragma once

#include <string>

#include "rgp/raster.hpp"

namespace rgp::io {

/// Decode a PNG or JPEG file (dispatched on magic bytes, not extension).
/// Color images come back as RGB, grayscale as Gray; 16-bit and palette
/// PNGs are reduced to 8-bit, alpha is stripped.
RasterImage load_image(const std::string& path);

/// Encode as 8-bit PNG (RGB or grayscale). YCbCr images are rejected;
/// convert before saving.
void save_png(const RasterImage& image, const std::string& path);

/// Encode as JPEG with the given quality (1-100).
void save_jpeg(const RasterImage& image, const std::string& path,
               int quality = 95);

} // namespace rgp::io
