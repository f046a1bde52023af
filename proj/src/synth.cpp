#include "rgp/synth.hpp"

#include <algorithm>
#include <cmath>

#include "rgp/prng.hpp"

namespace rgp::synth {

namespace {

uint8_t clamp_u8(double v) {
    return static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
}

double unit(SplitMix64& rng) {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

} // namespace

RasterImage fundus_image(uint64_t seed, int severity, int width, int height) {
    if (severity < 0 || severity > 3)
        fail("fundus_image: severity must be in [0,3], got ", severity);
    RasterImage img = RasterImage::make(width, height, ColorSpace::RGB);
    SplitMix64 rng(seed);

    const double cx = width / 2.0, cy = height / 2.0;
    const double radius = 0.40 * std::min(width, height);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double dx = x - cx, dy = y - cy;
            double d = std::sqrt(dx * dx + dy * dy);
            if (d > radius) continue;
            double shade = 1.0 - 0.35 * (d / radius); // darker toward the rim
            double noise = (unit(rng) - 0.5) * 10.0;
            img.at(x, y, 0) = clamp_u8(175.0 * shade + noise);
            img.at(x, y, 1) = clamp_u8(92.0 * shade + noise * 0.7);
            img.at(x, y, 2) = clamp_u8(46.0 * shade + noise * 0.5);
        }
    }

    // A few dark vessel strokes radiating from an off-center disc.
    double ox = cx - radius * 0.35, oy = cy;
    for (int k = 0; k < 4; ++k) {
        double angle = unit(rng) * 2.0 * 3.14159265358979 ;
        double bend = (unit(rng) - 0.5) * 0.02;
        for (double t = 0.0; t < radius * 1.4; t += 0.5) {
            double a = angle + bend * t;
            int px = static_cast<int>(std::lround(ox + t * std::cos(a)));
            int py = static_cast<int>(std::lround(oy + t * std::sin(a)));
            if (px < 0 || px >= width || py < 0 || py >= height) break;
            double dx = px - cx, dy = py - cy;
            if (dx * dx + dy * dy > radius * radius) break;
            for (int yy = py - 1; yy <= py; ++yy)
                for (int xx = px - 1; xx <= px; ++xx) {
                    if (xx < 0 || xx >= width || yy < 0 || yy >= height) continue;
                    img.at(xx, yy, 0) = clamp_u8(img.at(xx, yy, 0) * 0.55);
                    img.at(xx, yy, 1) = clamp_u8(img.at(xx, yy, 1) * 0.5);
                    img.at(xx, yy, 2) = clamp_u8(img.at(xx, yy, 2) * 0.5);
                }
        }
    }

    // Bright lesion blobs; count scales with severity. Blobs sit in
    // fixed ring slots with only pixel-level jitter, so images of the
    // same severity share a lesion layout and the labeling stays
    // linearly separable in pixel space.
    int lesions = severity * 4;
    for (int k = 0; k < lesions; ++k) {
        double a = 0.3 + 2.0 * 3.14159265358979 * k / std::max(lesions, 1);
        double r = radius * (k % 2 ? 0.62 : 0.34);
        double lx = cx + r * std::cos(a) + (unit(rng) - 0.5) * 3.0;
        double ly = cy + r * std::sin(a) + (unit(rng) - 0.5) * 3.0;
        double lr = 5.0 + unit(rng) * 1.0;
        int x0 = std::max(0, static_cast<int>(lx - lr - 1));
        int x1 = std::min(width - 1, static_cast<int>(lx + lr + 1));
        int y0 = std::max(0, static_cast<int>(ly - lr - 1));
        int y1 = std::min(height - 1, static_cast<int>(ly + lr + 1));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double dx = x - lx, dy = y - ly;
                if (dx * dx + dy * dy > lr * lr) continue;
                img.at(x, y, 0) = clamp_u8(img.at(x, y, 0) * 0.3 + 0.7 * 235.0);
                img.at(x, y, 1) = clamp_u8(img.at(x, y, 1) * 0.3 + 0.7 * 214.0);
                img.at(x, y, 2) = clamp_u8(img.at(x, y, 2) * 0.3 + 0.7 * 96.0);
            }
    }
    return img;
}

} // namespace rgp::synth
