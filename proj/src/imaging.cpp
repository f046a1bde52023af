#include "rgp/imaging.hpp"

#include <algorithm>
#include <cmath>

namespace rgp::imaging {

namespace {

uint8_t round_u8(double v) {
    double r = std::floor(v + 0.5); // round half up
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<uint8_t>(r);
}

// BT.601 luma/chroma coefficients (full range).
constexpr double KR = 0.299;
constexpr double KB = 0.114;
constexpr double KG = 1.0 - KR - KB;
constexpr double CB_R = 0.168736, CB_G = 0.331264;
constexpr double CR_G = 0.418688, CR_B = 0.081312;
// Inverse, derived from the same primaries.
constexpr double INV_CR_R = 2.0 * (1.0 - KR);            // 1.402
constexpr double INV_CB_B = 2.0 * (1.0 - KB);            // 1.772
constexpr double INV_CB_G = KB * INV_CB_B / KG;          // 0.344136...
constexpr double INV_CR_G = KR * INV_CR_R / KG;          // 0.714136...

void require_colorspace(const RasterImage& img, ColorSpace cs, const char* op) {
    img.validate();
    if (img.colorspace != cs)
        fail(op, ": expected ", to_string(cs), " input, got ",
             to_string(img.colorspace));
}

// Exact ranking key for the between-class variance
//   sigma_b^2(t) = w0 w1 (mu0 - mu1)^2 = (s0 N - S n0)^2 / (N^2 n0 n1),
// with N^2 dropped as a common factor. Stored as quotient + remainder
// of the 128-bit division so ties compare as true equalities.
struct VarianceKey {
    unsigned __int128 quot = 0;
    unsigned __int128 rem = 0;
    unsigned __int128 denom = 1;
};

VarianceKey variance_key(uint64_t n0, uint64_t s0, uint64_t n, uint64_t s) {
    uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) return {};
    __int128 a = static_cast<__int128>(s0) * n - static_cast<__int128>(s) * n0;
    unsigned __int128 mag = a < 0 ? static_cast<unsigned __int128>(-a)
                                  : static_cast<unsigned __int128>(a);
    unsigned __int128 a2 = mag * mag;
    unsigned __int128 m = static_cast<unsigned __int128>(n0) * n1;
    return {a2 / m, a2 % m, m};
}

bool key_greater(const VarianceKey& a, const VarianceKey& b) {
    if (a.quot != b.quot) return a.quot > b.quot;
    return a.rem * b.denom > b.rem * a.denom;
}

} // namespace

void PreprocessConfig::validate() const {
    if (clahe_tiles < 1) fail("clahe_tiles must be >= 1, got ", clahe_tiles);
    if (clahe_clip_limit < 1.0)
        fail("clahe_clip_limit must be >= 1.0, got ", clahe_clip_limit);
    if (!(blur_radius_fraction > 0.0))
        fail("blur_radius_fraction must be positive, got ", blur_radius_fraction);
    if (!(subtraction_gain > 0.0))
        fail("subtraction_gain must be positive, got ", subtraction_gain);
    if (subtraction_offset < 0 || subtraction_offset > 255)
        fail("subtraction_offset must be an 8-bit level, got ", subtraction_offset);
    if (output_size < 32) fail("output_size must be >= 32, got ", output_size);
}

Histogram256 compute_histogram(const RasterImage& image) {
    image.validate();
    if (image.channels != 1)
        fail("compute_histogram: expected single-channel image, got ",
             image.channels, " channels");
    Histogram256 hist;
    for (uint8_t v : image.data) ++hist.bins[v];
    return hist;
}

uint8_t otsu_threshold(const Histogram256& hist) {
    uint64_t n = hist.total();
    if (n == 0) fail("otsu_threshold: empty histogram");
    if (n >= (1ull << 28))
        fail("otsu_threshold: histogram larger than exact ranking supports");

    uint64_t s = 0;
    for (int v = 0; v < 256; ++v) s += hist.bins[v] * static_cast<uint64_t>(v);

    int best_t = 0;
    VarianceKey best;
    uint64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist.bins[t];
        s0 += hist.bins[t] * static_cast<uint64_t>(t);
        VarianceKey k = variance_key(n0, s0, n, s);
        if (key_greater(k, best)) {
            best = k;
            best_t = t;
        }
    }
    return static_cast<uint8_t>(best_t);
}

uint8_t luma_u8(uint8_t r, uint8_t g, uint8_t b) {
    return round_u8(KR * r + KG * g + KB * b);
}

CropResult crop_to_rim(const RasterImage& image) {
    require_colorspace(image, ColorSpace::RGB, "crop_to_rim");

    RasterImage gray = RasterImage::make(image.width, image.height, ColorSpace::Gray);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            gray.at(x, y) = luma_u8(image.at(x, y, 0), image.at(x, y, 1),
                                    image.at(x, y, 2));

    uint8_t t = otsu_threshold(compute_histogram(gray));

    int x0 = image.width, y0 = image.height, x1 = -1, y1 = -1;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (gray.at(x, y) > t) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
    }
    if (x1 < 0) fail("blank image");

    BoundingBox box{x0, y0, x1, y1};
    RasterImage out = RasterImage::make(box.width(), box.height(), ColorSpace::RGB);
    for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = image.at(box.x0 + x, box.y0 + y, c);

    double rim_radius = std::max(box.width(), box.height()) / 2.0;
    return {std::move(out), box, rim_radius};
}

RasterImage rgb_to_ycbcr(const RasterImage& image) {
    require_colorspace(image, ColorSpace::RGB, "rgb_to_ycbcr");
    RasterImage out = RasterImage::make(image.width, image.height, ColorSpace::YCbCr);
    size_t n = image.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        double r = image.data[3 * i], g = image.data[3 * i + 1],
               b = image.data[3 * i + 2];
        out.data[3 * i] = round_u8(KR * r + KG * g + KB * b);
        out.data[3 * i + 1] = round_u8(128.0 - CB_R * r - CB_G * g + 0.5 * b);
        out.data[3 * i + 2] = round_u8(128.0 + 0.5 * r - CR_G * g - CR_B * b);
    }
    return out;
}

RasterImage ycbcr_to_rgb(const RasterImage& image) {
    require_colorspace(image, ColorSpace::YCbCr, "ycbcr_to_rgb");
    RasterImage out = RasterImage::make(image.width, image.height, ColorSpace::RGB);
    size_t n = image.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        double y = image.data[3 * i];
        double cb = image.data[3 * i + 1] - 128.0;
        double cr = image.data[3 * i + 2] - 128.0;
        out.data[3 * i] = round_u8(y + INV_CR_R * cr);
        out.data[3 * i + 1] = round_u8(y - INV_CB_G * cb - INV_CR_G * cr);
        out.data[3 * i + 2] = round_u8(y + INV_CB_B * cb);
    }
    return out;
}

RasterImage gray_to_rgb(const RasterImage& image) {
    require_colorspace(image, ColorSpace::Gray, "gray_to_rgb");
    RasterImage out = RasterImage::make(image.width, image.height, ColorSpace::RGB);
    size_t n = image.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = image.data[i];
    }
    return out;
}

RasterImage extract_channel(const RasterImage& image, int channel) {
    image.validate();
    if (channel < 0 || channel >= image.channels)
        fail("extract_channel: channel ", channel, " out of range");
    RasterImage out = RasterImage::make(image.width, image.height, ColorSpace::Gray);
    size_t n = image.pixel_count();
    for (size_t i = 0; i < n; ++i)
        out.data[i] = image.data[i * image.channels + channel];
    return out;
}

void replace_channel(RasterImage& image, int channel, const RasterImage& plane) {
    image.validate();
    plane.validate();
    if (channel < 0 || channel >= image.channels)
        fail("replace_channel: channel ", channel, " out of range");
    if (plane.width != image.width || plane.height != image.height ||
        plane.channels != 1)
        fail("replace_channel: plane shape mismatch");
    size_t n = image.pixel_count();
    for (size_t i = 0; i < n; ++i)
        image.data[i * image.channels + channel] = plane.data[i];
}

std::array<double, 256> equalization_mapping(const Histogram256& hist,
                                             double clip_limit) {
    std::array<double, 256> map{};
    double n = static_cast<double>(hist.total());
    if (n == 0.0) {
        for (int v = 0; v < 256; ++v) map[v] = v;
        return map;
    }

    double clip = clip_limit * n / 256.0;
    std::array<double, 256> h{};
    double excess = 0.0;
    for (int v = 0; v < 256; ++v) {
        double b = static_cast<double>(hist.bins[v]);
        if (b > clip) {
            excess += b - clip;
            h[v] = clip;
        } else {
            h[v] = b;
        }
    }
    double spread = excess / 256.0;
    for (int v = 0; v < 256; ++v) h[v] += spread;

    std::array<double, 256> cdf{};
    double acc = 0.0;
    double cdf_min = 0.0;
    bool found_min = false;
    for (int v = 0; v < 256; ++v) {
        acc += h[v];
        cdf[v] = acc;
        if (!found_min && h[v] > 0.0) {
            cdf_min = acc;
            found_min = true;
        }
    }

    double denom = n - cdf_min;
    if (denom <= 0.0) {
        for (int v = 0; v < 256; ++v) map[v] = v;
        return map;
    }
    for (int v = 0; v < 256; ++v)
        map[v] = std::clamp((cdf[v] - cdf_min) / denom * 255.0, 0.0, 255.0);
    return map;
}

RasterImage adaptive_hist_eq(const RasterImage& channel, int tiles,
                             double clip_limit) {
    channel.validate();
    if (channel.channels != 1)
        fail("adaptive_hist_eq: expected single-channel image");
    if (tiles < 1) fail("adaptive_hist_eq: tile count must be >= 1");
    if (channel.width < tiles || channel.height < tiles)
        fail("adaptive_hist_eq: image ", channel.width, "x", channel.height,
             " smaller than ", tiles, "x", tiles, " tile grid");

    const int T = tiles;
    const int W = channel.width, H = channel.height;

    // Tile extents: tile t covers [t*size/T, (t+1)*size/T).
    std::vector<int> xs(T + 1), ys(T + 1);
    for (int t = 0; t <= T; ++t) {
        xs[t] = static_cast<int>(static_cast<int64_t>(t) * W / T);
        ys[t] = static_cast<int>(static_cast<int64_t>(t) * H / T);
    }

    std::vector<std::array<double, 256>> maps(static_cast<size_t>(T) * T);
    for (int ty = 0; ty < T; ++ty) {
        for (int tx = 0; tx < T; ++tx) {
            Histogram256 hist;
            for (int y = ys[ty]; y < ys[ty + 1]; ++y)
                for (int x = xs[tx]; x < xs[tx + 1]; ++x)
                    ++hist.bins[channel.at(x, y)];
            maps[static_cast<size_t>(ty) * T + tx] =
                equalization_mapping(hist, clip_limit);
        }
    }

    // Per-axis interpolation tables: left tile index and right-tile weight
    // for each coordinate, anchored at tile centers.
    auto center = [](int lo, int hi) { return (lo + hi - 1) / 2.0; };
    auto build_axis = [&](const std::vector<int>& bounds, int size,
                          std::vector<int>& t0, std::vector<double>& w) {
        t0.resize(size);
        w.resize(size);
        for (int p = 0; p < size; ++p) {
            double pos = p;
            if (T == 1 || pos <= center(bounds[0], bounds[1])) {
                t0[p] = 0;
                w[p] = 0.0;
            } else if (pos >= center(bounds[T - 1], bounds[T])) {
                t0[p] = T - 1;
                w[p] = 0.0;
            } else {
                int t = 0;
                while (t + 1 < T && center(bounds[t + 1], bounds[t + 2]) < pos) ++t;
                double c0 = center(bounds[t], bounds[t + 1]);
                double c1 = center(bounds[t + 1], bounds[t + 2]);
                t0[p] = t;
                w[p] = (pos - c0) / (c1 - c0);
            }
        }
    };

    std::vector<int> tx0, ty0;
    std::vector<double> wx, wy;
    build_axis(xs, W, tx0, wx);
    build_axis(ys, H, ty0, wy);

    RasterImage out = RasterImage::make(W, H, ColorSpace::Gray);
    for (int y = 0; y < H; ++y) {
        int t_y = ty0[y];
        int t_y1 = std::min(t_y + 1, T - 1);
        double fy = wy[y];
        for (int x = 0; x < W; ++x) {
            int t_x = tx0[x];
            int t_x1 = std::min(t_x + 1, T - 1);
            double fx = wx[x];
            int v = channel.at(x, y);
            double m00 = maps[static_cast<size_t>(t_y) * T + t_x][v];
            double m01 = maps[static_cast<size_t>(t_y) * T + t_x1][v];
            double m10 = maps[static_cast<size_t>(t_y1) * T + t_x][v];
            double m11 = maps[static_cast<size_t>(t_y1) * T + t_x1][v];
            double top = m00 * (1.0 - fx) + m01 * fx;
            double bottom = m10 * (1.0 - fx) + m11 * fx;
            out.at(x, y) = round_u8(top * (1.0 - fy) + bottom * fy);
        }
    }
    return out;
}

RasterImage subtract_local_average(const RasterImage& image, int radius,
                                   double gain, int offset) {
    require_colorspace(image, ColorSpace::RGB, "subtract_local_average");
    if (radius < 1) fail("subtract_local_average: radius must be >= 1");

    double sigma = radius / 2.0;
    int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> w(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        w[i + half] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += w[i + half];
    }
    for (double& v : w) v /= sum;

    const int W = image.width, H = image.height;
    RasterImage out = RasterImage::make(W, H, ColorSpace::RGB);
    std::vector<double> pass1(static_cast<size_t>(W) * H);
    std::vector<double> pass2(static_cast<size_t>(W) * H);
    std::vector<double> padded(static_cast<size_t>(W) + 2 * half);

    for (int c = 0; c < 3; ++c) {
        // Horizontal then vertical pass with edge replication. Rows are
        // padded (horizontal) and accumulated tap-major (vertical) so the
        // inner loops run over contiguous memory; per-pixel summation
        // order is ascending tap index in both passes.
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x)
                padded[half + x] = image.at(x, y, c);
            std::fill(padded.begin(), padded.begin() + half, padded[half]);
            std::fill(padded.end() - half, padded.end(), padded[half + W - 1]);
            double* row = pass1.data() + static_cast<size_t>(y) * W;
            for (int x = 0; x < W; ++x) {
                const double* src = padded.data() + x;
                double acc = 0.0;
                for (int i = 0; i <= 2 * half; ++i) acc += w[i] * src[i];
                row[x] = acc;
            }
        }
        for (int y = 0; y < H; ++y) {
            double* acc_row = pass2.data() + static_cast<size_t>(y) * W;
            std::fill(acc_row, acc_row + W, 0.0);
            for (int j = -half; j <= half; ++j) {
                int sy = std::clamp(y + j, 0, H - 1);
                const double* src = pass1.data() + static_cast<size_t>(sy) * W;
                double weight = w[j + half];
                for (int x = 0; x < W; ++x) acc_row[x] += weight * src[x];
            }
        }
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                double blurred = pass2[static_cast<size_t>(y) * W + x];
                double v = gain * (image.at(x, y, c) - blurred) + offset;
                out.at(x, y, c) = round_u8(v);
            }
    }
    return out;
}

RasterImage resize_bilinear(const RasterImage& image, int out_w, int out_h) {
    image.validate();
    if (out_w < 1 || out_h < 1)
        fail("resize_bilinear: output dimensions must be >= 1");

    RasterImage out;
    out.width = out_w;
    out.height = out_h;
    out.channels = image.channels;
    out.colorspace = image.colorspace;
    out.data.resize(static_cast<size_t>(out_w) * out_h * image.channels);

    double sx_scale = static_cast<double>(image.width) / out_w;
    double sy_scale = static_cast<double>(image.height) / out_h;

    for (int y = 0; y < out_h; ++y) {
        double sy = std::clamp((y + 0.5) * sy_scale - 0.5, 0.0,
                               static_cast<double>(image.height - 1));
        int y0 = static_cast<int>(sy);
        int y1 = std::min(y0 + 1, image.height - 1);
        double fy = sy - y0;
        for (int x = 0; x < out_w; ++x) {
            double sx = std::clamp((x + 0.5) * sx_scale - 0.5, 0.0,
                                   static_cast<double>(image.width - 1));
            int x0 = static_cast<int>(sx);
            int x1 = std::min(x0 + 1, image.width - 1);
            double fx = sx - x0;
            for (int c = 0; c < image.channels; ++c) {
                double top = image.at(x0, y0, c) * (1.0 - fx) + image.at(x1, y0, c) * fx;
                double bottom = image.at(x0, y1, c) * (1.0 - fx) + image.at(x1, y1, c) * fx;
                out.at(x, y, c) = round_u8(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    return out;
}

PreprocessResult preprocess(const RasterImage& image,
                            const PreprocessConfig& config,
                            const StageObserver& observer) {
    config.validate();
    require_colorspace(image, ColorSpace::RGB, "preprocess");

    PreprocessResult result;
    auto run_stage = [&](const char* name, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            fail(name, ": ", e.what());
        }
        result.trace.emplace_back(name);
        if (observer) observer(name, result.image);
    };

    run_stage("crop", [&] {
        CropResult crop = crop_to_rim(image);
        result.image = std::move(crop.image);
        result.box = crop.box;
        result.rim_radius = crop.rim_radius;
    });

    run_stage("equalize", [&] {
        RasterImage ycbcr = rgb_to_ycbcr(result.image);
        RasterImage y = extract_channel(ycbcr, 0);
        y = adaptive_hist_eq(y, config.clahe_tiles, config.clahe_clip_limit);
        replace_channel(ycbcr, 0, y);
        result.image = ycbcr_to_rgb(ycbcr);
    });

    run_stage("subtract", [&] {
        int radius = std::max(
            1, static_cast<int>(std::lround(config.blur_radius_fraction *
                                            result.rim_radius)));
        result.image = subtract_local_average(result.image, radius,
                                              config.subtraction_gain,
                                              config.subtraction_offset);
    });

    run_stage("resize", [&] {
        result.image =
            resize_bilinear(result.image, config.output_size, config.output_size);
    });

    return result;
}

} // namespace rgp::imaging
