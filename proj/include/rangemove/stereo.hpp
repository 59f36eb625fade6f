#ifndef RANGEMOVE_STEREO_HPP
#define RANGEMOVE_STEREO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/prior.hpp"

namespace rangemove {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::uint8_t operator()(int x, int y) const { return pixels[index(x, y)]; }
    std::uint8_t& operator()(int x, int y) { return pixels[index(x, y)]; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
};

struct ImagePair {
    GrayImage left;
    GrayImage right;
};

inline void validate_pair(const ImagePair& pair, int label_count) {
    detail::require(pair.left.width > 0 && pair.left.height > 0, "stereo: empty image");
    detail::require(pair.left.width == pair.right.width && pair.left.height == pair.right.height,
                    "stereo: left and right images differ in size");
    detail::require(label_count >= 2, "stereo: need at least two disparities");
    detail::require(pair.left.width > label_count - 1, "stereo: image narrower than the disparity range");
}

namespace detail {

inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

inline int pnm_int(std::istream& in, const char* what) {
    const std::string tok = pnm_token(in);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError(std::string("pnm: bad ") + what);
    return std::stoi(tok);
}

} // namespace detail

/// Reads P2, P5 (gray) and P6 (color, converted to luma) with maxval <= 255.
inline GrayImage read_pnm(std::istream& in) {
    const std::string magic = detail::pnm_token(in);
    if (magic != "P2" && magic != "P5" && magic != "P6")
        throw ParseError("pnm: unsupported format '" + magic + "' (expected P2, P5 or P6)");
    const int w = detail::pnm_int(in, "width");
    const int h = detail::pnm_int(in, "height");
    const int maxval = detail::pnm_int(in, "maxval");
    if (w < 1 || h < 1) throw ParseError("pnm: empty image");
    if (maxval < 1 || maxval > 255) throw ParseError("pnm: only 8-bit images are supported");
    GrayImage img(w, h);
    const auto scale = [&](int v) {
        return static_cast<std::uint8_t>(std::lround(255.0 * v / maxval));
    };
    if (magic == "P2") {
        for (auto& p : img.pixels) {
            const int v = detail::pnm_int(in, "pixel");
            if (v > maxval) throw ParseError("pnm: pixel exceeds maxval");
            p = scale(v);
        }
        return img;
    }
    const int channels = magic == "P6" ? 3 : 1;
    std::vector<unsigned char> raw(img.pixels.size() * static_cast<std::size_t>(channels));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw ParseError("pnm: truncated pixel data");
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        if (channels == 1) {
            img.pixels[k] = scale(raw[k]);
        } else {
            const double luma = 0.299 * raw[3 * k] + 0.587 * raw[3 * k + 1] + 0.114 * raw[3 * k + 2];
            img.pixels[k] = scale(static_cast<int>(std::lround(luma)));
        }
    }
    return img;
}

inline GrayImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open image '" + path + "'");
    return read_pnm(in);
}

inline void write_pgm(std::ostream& out, const GrayImage& img) {
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void save_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write image '" + path + "'");
    write_pgm(out, img);
}

/// Birchfield-Tomasi dissimilarity between left pixel (x, y) and right pixel
/// (x - d, y). Returns nullopt when the right sample falls outside the image.
inline std::optional<double> bt_dissimilarity(const ImagePair& pair, int x, int y, int d) {
    const GrayImage& L = pair.left;
    const GrayImage& R = pair.right;
    const int xr = x - d;
    if (x < 0 || x >= L.width || y < 0 || y >= L.height || xr < 0 || xr >= R.width) return std::nullopt;
    auto one_sided = [y](const GrayImage& a, int xa, const GrayImage& b, int xb) {
        const double ia = a(xa, y);
        const double ib = b(xb, y);
        const double minus = 0.5 * (ib + b(std::max(xb - 1, 0), y));
        const double plus = 0.5 * (ib + b(std::min(xb + 1, b.width - 1), y));
        const double lo = std::min({minus, plus, ib});
        const double hi = std::max({minus, plus, ib});
        return std::max({0.0, ia - hi, lo - ia});
    };
    return std::min(one_sided(L, x, R, xr), one_sided(R, xr, L, x));
}

/// (width*height) x label_count unary table. Disparities whose right sample
/// is out of frame take the largest in-frame cost of that pixel.
inline UnaryTable bt_unary(const ImagePair& pair, int label_count) {
    validate_pair(pair, label_count);
    const int w = pair.left.width, h = pair.left.height;
    std::vector<double> costs(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                              static_cast<std::size_t>(label_count));
    std::vector<std::optional<double>> row(static_cast<std::size_t>(label_count));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double worst = 0.0;
            for (int d = 0; d < label_count; ++d) {
                row[static_cast<std::size_t>(d)] = bt_dissimilarity(pair, x, y, d);
                if (row[static_cast<std::size_t>(d)]) worst = std::max(worst, *row[static_cast<std::size_t>(d)]);
            }
            const std::size_t base =
                (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) *
                static_cast<std::size_t>(label_count);
            for (int d = 0; d < label_count; ++d)
                costs[base + static_cast<std::size_t>(d)] = row[static_cast<std::size_t>(d)].value_or(worst);
        }
    }
    return UnaryTable(w * h, label_count, std::move(costs));
}

/// w_hi when the left-image intensity difference across the edge is <= tau,
/// w_lo otherwise. A constant weight has w_hi == w_lo.
struct WeightRule {
    double w_hi = 1.0;
    double w_lo = 1.0;
    int tau = 255;

    static WeightRule constant(double w) { return {w, w, 255}; }
    static WeightRule thresholded(double hi, double lo, int t) { return {hi, lo, t}; }
    bool is_constant() const { return w_hi == w_lo; }
    double operator()(int gradient) const { return gradient <= tau ? w_hi : w_lo; }
};

struct StereoParams {
    int label_count = 16;
    int truncation = 3;
    PriorKind prior = PriorKind::TruncatedQuadratic;
    WeightRule weight = WeightRule::constant(1.0);
};

/// Named parameter rows (weight, disparity count, truncation). The prior
/// defaults to truncated quadratic and can be overridden.
inline std::optional<StereoParams> stereo_preset(std::string_view name) {
    StereoParams p;
    if (name == "map") {
        p.weight = WeightRule::constant(4);
        p.label_count = 30;
        p.truncation = 6;
    } else if (name == "venus") {
        p.weight = WeightRule::constant(50);
        p.label_count = 20;
        p.truncation = 3;
    } else if (name == "sawtooth") {
        p.weight = WeightRule::constant(20);
        p.label_count = 20;
        p.truncation = 3;
    } else if (name == "teddy") {
        p.weight = WeightRule::thresholded(30, 10, 10);
        p.label_count = 60;
        p.truncation = 8;
    } else if (name == "cones") {
        p.weight = WeightRule::constant(10);
        p.label_count = 60;
        p.truncation = 8;
    } else if (name == "kitti") {
        p.weight = WeightRule::constant(20);
        p.label_count = 40;
        p.truncation = 8;
    } else {
        return std::nullopt;
    }
    return p;
}

inline EnergyModel build_stereo_model(const ImagePair& pair, const StereoParams& params) {
    validate_pair(pair, params.label_count);
    GraphTopology topology = make_grid_topology(pair.left.width, pair.left.height);
    std::vector<double> weights;
    weights.reserve(topology.edge_count());
    const int w = pair.left.width;
    for (const Edge& e : topology.edges()) {
        const int a = pair.left(e.u % w, e.u / w);
        const int b = pair.left(e.v % w, e.v / w);
        weights.push_back(params.weight(std::abs(a - b)));
    }
    return EnergyModel(std::move(topology), bt_unary(pair, params.label_count),
                       make_prior(params.prior, params.truncation, params.label_count), std::move(weights));
}

/// Disparity d is written as d * floor(255 / (label_count - 1)).
inline GrayImage disparity_image(const Labeling& x, int width, int height, int label_count) {
    detail::require(x.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                    "disparity_image: labeling size mismatch");
    const int step = 255 / std::max(label_count - 1, 1);
    GrayImage img(width, height);
    for (std::size_t k = 0; k < x.size(); ++k) img.pixels[k] = static_cast<std::uint8_t>(x[k] * step);
    return img;
}

/// Left image f(x, y) = (5x + 2y) mod 200 + 20 and right image
/// R(x, y) = f(x + shift, y), so the true disparity is `shift` everywhere.
inline ImagePair shifted_ramp_pair(int width, int height, int shift) {
    detail::require(width > 0 && height > 0 && shift >= 0, "shifted_ramp_pair: bad dimensions");
    auto f = [](int x, int y) { return static_cast<std::uint8_t>((5 * x + 2 * y) % 200 + 20); };
    ImagePair pair{GrayImage(width, height), GrayImage(width, height)};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            pair.left(x, y) = f(x, y);
            pair.right(x, y) = f(x + shift, y);
        }
    }
    return pair;
}

} // namespace rangemove

#endif // RANGEMOVE_STEREO_HPP
