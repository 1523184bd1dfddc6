#include "stylelab/ppm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stylelab/errors.hpp"

namespace stylelab {

namespace {

unsigned char quantize(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Next whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

}  // namespace

void write_ppm(const Tensor& image, const std::string& path) {
    if (image.rank() != 3 || image.dim(0) != 3) {
        throw FormatError("write_ppm: expected 3xHxW image, got " + image.shape_str());
    }
    const int h = image.dim(1), w = image.dim(2);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("write_ppm: cannot open '" + path + "'");
    os << "P6\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            row[static_cast<size_t>(x) * 3 + 0] = quantize(image.at(0, y, x));
            row[static_cast<size_t>(x) * 3 + 1] = quantize(image.at(1, y, x));
            row[static_cast<size_t>(x) * 3 + 2] = quantize(image.at(2, y, x));
        }
        os.write(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!os) throw FormatError("write_ppm: write failed for '" + path + "'");
}

Tensor read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_ppm: cannot open '" + path + "'");
    if (next_token(in) != "P6") throw FormatError("read_ppm: '" + path + "' is not binary P6");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token(in));
        h = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw FormatError("read_ppm: malformed header in '" + path + "'");
    }
    if (w < 1 || h < 1 || maxval != 255) {
        throw FormatError("read_ppm: unsupported dimensions/maxval in '" + path + "'");
    }
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<size_t>(in.gcount()) != buf.size()) {
        throw FormatError("read_ppm: truncated pixel data in '" + path + "'");
    }
    Tensor img({3, h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(c, y, x) =
                    buf[(static_cast<size_t>(y) * w + x) * 3 + static_cast<size_t>(c)] / 255.0;
    return img;
}

void write_pgm(const Tensor& map, const std::string& path) {
    if (map.rank() != 2) throw FormatError("write_pgm: expected HxW map");
    const int h = map.dim(0), w = map.dim(1);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("write_pgm: cannot open '" + path + "'");
    os << "P5\n" << w << " " << h << "\n255\n";
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) os.put(static_cast<char>(quantize(map.at(y, x))));
    if (!os) throw FormatError("write_pgm: write failed for '" + path + "'");
}

}  // namespace stylelab
