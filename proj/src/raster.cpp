#include "rgp/raster.hpp"

namespace rgp {

const char* to_string(ColorSpace cs) {
    switch (cs) {
    case ColorSpace::RGB: return "RGB";
    case ColorSpace::YCbCr: return "YCbCr";
    case ColorSpace::Gray: return "Gray";
    }
    return "?";
}

RasterImage RasterImage::make(int w, int h, ColorSpace cs, uint8_t fill) {
    if (w < 1 || h < 1) fail("image dimensions must be positive, got ", w, "x", h);
    RasterImage img;
    img.width = w;
    img.height = h;
    img.channels = (cs == ColorSpace::Gray) ? 1 : 3;
    img.colorspace = cs;
    img.data.assign(static_cast<size_t>(w) * h * img.channels, fill);
    return img;
}

void RasterImage::validate() const {
    if (width < 1 || height < 1)
        fail("invalid image dimensions ", width, "x", height);
    if (channels != 1 && channels != 3)
        fail("invalid channel count ", channels);
    if (colorspace == ColorSpace::Gray && channels != 1)
        fail("Gray image must have 1 channel, has ", channels);
    if (colorspace != ColorSpace::Gray && channels != 3)
        fail(to_string(colorspace), " image must have 3 channels, has ", channels);
    size_t expected = static_cast<size_t>(width) * height * channels;
    if (data.size() != expected)
        fail("image data size ", data.size(), " does not match ", width, "x",
             height, "x", channels);
}

} // namespace rgp
