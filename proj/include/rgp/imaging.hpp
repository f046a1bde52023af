#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "rgp/raster.hpp"

namespace rgp::imaging {

/// Axis-aligned pixel box, both corners inclusive.
struct BoundingBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    bool operator==(const BoundingBox&) const = default;
};

/// Knobs of the preprocessing chain. Defaults reflect common fundus
/// practice; all of them are overridable per run.
struct PreprocessConfig {
    int clahe_tiles = 8;               // tile grid is clahe_tiles x clahe_tiles
    double clahe_clip_limit = 4.0;     // multiplier of the uniform bin height
    double blur_radius_fraction = 0.30; // blur radius as fraction of rim radius
    double subtraction_gain = 4.0;
    int subtraction_offset = 128;
    int output_size = 448;             // final square side fed to classifiers

    void validate() const; // throws on out-of-range values
};

struct CropResult {
    RasterImage image;
    BoundingBox box;
    double rim_radius = 0.0; // half the larger box side, in pixels
};

struct PreprocessResult {
    RasterImage image;
    BoundingBox box;
    double rim_radius = 0.0;
    std::vector<std::string> trace; // stage names, in execution order
};

/// Called after each stage with the stage name and its output image.
using StageObserver =
    std::function<void(const std::string& stage, const RasterImage&)>;

/// Count pixel intensities of a single-channel image.
Histogram256 compute_histogram(const RasterImage& image);

/// Otsu's threshold: the t in [0,255] maximizing the between-class
/// variance sigma_b^2(t) = w0*w1*(mu0-mu1)^2 with class 0 = values <= t.
/// Ties break to the smallest t. The ranking is evaluated in exact
/// integer arithmetic (valid up to ~1.3e8 pixels), so equal variances
/// compare as equal rather than drifting on floating-point noise.
uint8_t otsu_threshold(const Histogram256& hist);

/// BT.601 full-range luma of one RGB pixel, rounded half-up.
uint8_t luma_u8(uint8_t r, uint8_t g, uint8_t b);

/// Threshold the luma with Otsu and crop to the tight bounding box of
/// the foreground (luma strictly greater than the threshold). Throws
/// "blank image" when nothing survives thresholding.
CropResult crop_to_rim(const RasterImage& image);

/// Full-range BT.601 color transforms, rounded half-up and clamped.
///   Y  =  0.299 R + 0.587 G + 0.114 B
///   Cb = 128 - 0.168736 R - 0.331264 G + 0.5 B
///   Cr = 128 + 0.5 R - 0.418688 G - 0.081312 B
RasterImage rgb_to_ycbcr(const RasterImage& image);
RasterImage ycbcr_to_rgb(const RasterImage& image);

/// Replicate a gray image into the RGB channels.
RasterImage gray_to_rgb(const RasterImage& image);

/// Extract / replace one channel of an interleaved image.
RasterImage extract_channel(const RasterImage& image, int channel);
void replace_channel(RasterImage& image, int channel, const RasterImage& plane);

/// Per-tile CLAHE transfer function for a tile histogram: clip at
/// clip_limit * (pixels/256), spread the clipped excess uniformly over
/// all bins (single pass), then map through the CDF normalized so that
/// the first occupied level maps to 0 and the last to 255:
///   map[v] = (cdf[v] - cdf_min) / (pixels - cdf_min) * 255
/// A histogram that is exactly uniform over all 256 levels therefore
/// maps to the identity. Degenerate case pixels == cdf_min (single
/// occupied level, no redistribution) also returns the identity.
std::array<double, 256> equalization_mapping(const Histogram256& hist,
                                             double clip_limit);

/// Contrast-limited adaptive histogram equalization on a single-channel
/// image: tiles x tiles grid, per-tile mapping as above, bilinear
/// interpolation between the four surrounding tile mappings, rounding
/// half-up once at the end. Throws if the image is smaller than the
/// tile grid.
RasterImage adaptive_hist_eq(const RasterImage& channel, int tiles,
                             double clip_limit);

/// Per channel: out = clamp(gain * (in - blur(in)) + offset, 0, 255)
/// where blur is a Gaussian with sigma = radius/2, taps |i| <= ceil(3*sigma)
/// (at least 1), weights normalized to unit sum, borders replicated.
/// The blur runs in double precision; rounding happens once at the end.
RasterImage subtract_local_average(const RasterImage& image, int radius,
                                   double gain, int offset);

/// Bilinear resize with half-pixel center alignment:
/// src = (dst + 0.5) * (src_size / dst_size) - 0.5, clamped to the frame.
RasterImage resize_bilinear(const RasterImage& image, int out_w, int out_h);

/// The whole chain: crop to rim, equalize Y in YCbCr, subtract the
/// local average color (blur radius = blur_radius_fraction * rim
/// radius), resize to output_size^2. Stage failures rethrow with the
/// stage name prefixed.
PreprocessResult preprocess(const RasterImage& image,
                            const PreprocessConfig& config,
                            const StageObserver& observer = nullptr);

} // namespace rgp::imaging
