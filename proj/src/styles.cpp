#include "stylelab/styles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stylelab {

namespace {

constexpr int kS = 32;

struct ParamRange {
    const char* name;
    double lo, hi, def;
};

struct StyleDef {
    const char* name;
    bool idempotent;
    std::vector<ParamRange> params;
};

const std::vector<StyleDef>& style_defs() {
    static const std::vector<StyleDef> defs = {
        {"realism_analog", false, {{"blur", 0, 2, 1}, {"contrast", 0.5, 2.0, 1.15}}},
        {"pixelation", true, {{"block", 2, 16, 4}}},
        {"polygonal", true, {{"cell", 4, 16, 8}}},
        {"palette_shift", false, {{"warmth", 0.0, 0.5, 0.16}, {"darken", 0.3, 1.0, 0.82}}},
        {"sureb_analog", false,
         {{"contrast", 1.0, 3.0, 1.7}, {"saturation", 0.0, 3.0, 1.45}, {"vignette", 0.0, 1.0, 0.55}}},
        {"anime_analog", false, {{"levels", 2, 16, 5}, {"edge", 0.05, 1.0, 0.25}}},
    };
    return defs;
}

const StyleDef& find_def(const std::string& name) {
    for (const auto& d : style_defs()) {
        if (name == d.name) return d;
    }
    throw std::invalid_argument("unknown style '" + name + "'");
}

double luma(const Tensor& img, int y, int x) {
    return 0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) + 0.114 * img.at(2, y, x);
}

void check_image(const Tensor& img) {
    if (img.rank() != 3 || img.dim(0) != 3 || img.dim(1) != kS || img.dim(2) != kS) {
        throw std::invalid_argument("apply_style: expected 3x32x32 image, got " +
                                    img.shape_str());
    }
}

Tensor box_blur(const Tensor& img) {
    Tensor out(img.shape);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < kS; ++y) {
            for (int x = 0; x < kS; ++x) {
                double s = 0.0;
                int n = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int yy = y + dy, xx = x + dx;
                        if (yy < 0 || yy >= kS || xx < 0 || xx >= kS) continue;
                        s += img.at(c, yy, xx);
                        ++n;
                    }
                }
                out.at(c, y, x) = s / n;
            }
        }
    }
    return out;
}

Tensor t_realism(const Tensor& img, double blur, double contrast) {
    Tensor out = img;
    for (int i = 0; i < static_cast<int>(blur); ++i) out = box_blur(out);
    for (double& v : out.data) v = std::clamp(0.5 + (v - 0.5) * contrast, 0.0, 1.0);
    return out;
}

Tensor t_pixelation(const Tensor& img, int block) {
    Tensor out(img.shape);
    for (int c = 0; c < 3; ++c) {
        for (int by = 0; by < kS; by += block) {
            for (int bx = 0; bx < kS; bx += block) {
                double s = 0.0;
                int n = 0;
                for (int y = by; y < std::min(kS, by + block); ++y)
                    for (int x = bx; x < std::min(kS, bx + block); ++x) {
                        s += img.at(c, y, x);
                        ++n;
                    }
                const double m = s / n;
                for (int y = by; y < std::min(kS, by + block); ++y)
                    for (int x = bx; x < std::min(kS, bx + block); ++x) out.at(c, y, x) = m;
            }
        }
    }
    return out;
}

// Each cell splits along its main diagonal into two triangular facets
// averaged independently; averaging is a projection, hence idempotent.
Tensor t_polygonal(const Tensor& img, int cell) {
    Tensor out(img.shape);
    for (int c = 0; c < 3; ++c) {
        for (int by = 0; by < kS; by += cell) {
            for (int bx = 0; bx < kS; bx += cell) {
                double s0 = 0.0, s1 = 0.0;
                int n0 = 0, n1 = 0;
                for (int y = by; y < std::min(kS, by + cell); ++y)
                    for (int x = bx; x < std::min(kS, bx + cell); ++x) {
                        if ((y - by) >= (x - bx)) {
                            s0 += img.at(c, y, x);
                            ++n0;
                        } else {
                            s1 += img.at(c, y, x);
                            ++n1;
                        }
                    }
                const double m0 = n0 ? s0 / n0 : 0.0;
                const double m1 = n1 ? s1 / n1 : 0.0;
                for (int y = by; y < std::min(kS, by + cell); ++y)
                    for (int x = bx; x < std::min(kS, bx + cell); ++x)
                        out.at(c, y, x) = ((y - by) >= (x - bx)) ? m0 : m1;
            }
        }
    }
    return out;
}

Tensor t_palette_shift(const Tensor& img, double warmth, double darken) {
    Tensor out(img.shape);
    for (int y = 0; y < kS; ++y) {
        for (int x = 0; x < kS; ++x) {
            const double r = img.at(0, y, x), g = img.at(1, y, x), b = img.at(2, y, x);
            const double rr = (0.62 * r + 0.28 * g + 0.10 * b + warmth) * darken;
            const double gg = (0.20 * r + 0.62 * g + 0.12 * b + warmth * 0.5) * darken;
            const double bb = (0.10 * r + 0.18 * g + 0.55 * b) * darken;
            out.at(0, y, x) = std::clamp(rr, 0.0, 1.0);
            out.at(1, y, x) = std::clamp(gg, 0.0, 1.0);
            out.at(2, y, x) = std::clamp(bb, 0.0, 1.0);
        }
    }
    return out;
}

Tensor t_sureb(const Tensor& img, double contrast, double saturation, double vignette) {
    Tensor out(img.shape);
    const double cx = (kS - 1) / 2.0, cy = (kS - 1) / 2.0;
    const double dmax = std::sqrt(cx * cx + cy * cy);
    for (int y = 0; y < kS; ++y) {
        for (int x = 0; x < kS; ++x) {
            const double l = luma(img, y, x);
            const double d = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy)) / dmax;
            const double vig = 1.0 - vignette * d * d;
            for (int c = 0; c < 3; ++c) {
                double v = img.at(c, y, x);
                v = l + (v - l) * saturation;           // saturate around luma
                v = 0.5 + (v - 0.5) * contrast;         // dramatic contrast
                out.at(c, y, x) = std::clamp(v * vig, 0.0, 1.0);
            }
        }
    }
    return out;
}

Tensor t_anime(const Tensor& img, int levels, double edge) {
    Tensor out(img.shape);
    // cel quantization
    for (size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = std::round(img.data[i] * (levels - 1)) / (levels - 1);
    }
    // darken strong luma edges (sobel)
    for (int y = 1; y < kS - 1; ++y) {
        for (int x = 1; x < kS - 1; ++x) {
            const double gx = luma(img, y - 1, x + 1) + 2 * luma(img, y, x + 1) +
                              luma(img, y + 1, x + 1) - luma(img, y - 1, x - 1) -
                              2 * luma(img, y, x - 1) - luma(img, y + 1, x - 1);
            const double gy = luma(img, y + 1, x - 1) + 2 * luma(img, y + 1, x) +
                              luma(img, y + 1, x + 1) - luma(img, y - 1, x - 1) -
                              2 * luma(img, y - 1, x) - luma(img, y - 1, x + 1);
            if (std::sqrt(gx * gx + gy * gy) > edge) {
                for (int c = 0; c < 3; ++c) out.at(c, y, x) *= 0.30;
            }
        }
    }
    return out;
}

}  // namespace

const std::vector<std::string>& style_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& d : style_defs()) n.emplace_back(d.name);
        return n;
    }();
    return names;
}

StyleTransformSpec make_style(const std::string& name) { return make_style(name, {}); }

StyleTransformSpec make_style(const std::string& name,
                              const std::map<std::string, double>& overrides) {
    const StyleDef& def = find_def(name);
    StyleTransformSpec spec;
    spec.name = def.name;
    spec.idempotent = def.idempotent;
    for (const auto& p : def.params) spec.parameters[p.name] = p.def;
    for (const auto& [k, v] : overrides) {
        const ParamRange* pr = nullptr;
        for (const auto& p : def.params) {
            if (k == p.name) pr = &p;
        }
        if (!pr) throw std::invalid_argument("style '" + name + "' has no parameter '" + k + "'");
        if (v < pr->lo || v > pr->hi) {
            throw std::invalid_argument("style '" + name + "' parameter '" + k +
                                        "' out of range [" + std::to_string(pr->lo) + ", " +
                                        std::to_string(pr->hi) + "]");
        }
        spec.parameters[k] = v;
    }
    return spec;
}

Tensor apply_style(const StyleTransformSpec& spec, const Tensor& image) {
    check_image(image);
    const StyleDef& def = find_def(spec.name);
    auto param = [&def, &spec](const std::string& k) {
        auto it = spec.parameters.find(k);
        if (it == spec.parameters.end()) {
            throw std::invalid_argument("style '" + spec.name + "' missing parameter '" + k + "'");
        }
        for (const auto& p : def.params) {
            if (k == p.name && (it->second < p.lo || it->second > p.hi)) {
                throw std::invalid_argument("style '" + spec.name + "' parameter '" + k +
                                            "' out of range");
            }
        }
        return it->second;
    };
    if (spec.name == "realism_analog") return t_realism(image, param("blur"), param("contrast"));
    if (spec.name == "pixelation") return t_pixelation(image, static_cast<int>(param("block")));
    if (spec.name == "polygonal") return t_polygonal(image, static_cast<int>(param("cell")));
    if (spec.name == "palette_shift")
        return t_palette_shift(image, param("warmth"), param("darken"));
    if (spec.name == "sureb_analog")
        return t_sureb(image, param("contrast"), param("saturation"), param("vignette"));
    return t_anime(image, static_cast<int>(param("levels")), param("edge"));
}

std::string default_aux_style(const std::string& target_style) {
    find_def(target_style);
    if (target_style == "pixelation") return "realism_analog";   // realistic figures for pixel art
    if (target_style == "polygonal") return "palette_shift";     // painterly aux for facet styles
    if (target_style == "realism_analog") return "sureb_analog";
    return "realism_analog";
}

}  // namespace stylelab
