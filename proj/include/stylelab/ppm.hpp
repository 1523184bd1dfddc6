#pragma once

#include <string>

#include "stylelab/tensor.hpp"

namespace stylelab {

// Binary P6, maxval 255. Images are 3 x H x W tensors with values in [0,1];
// writing quantizes with round(v * 255) after clamping.
void write_ppm(const Tensor& image, const std::string& path);
Tensor read_ppm(const std::string& path);

// P5 grayscale, used for attention heatmaps. map is H x W in [0,1].
void write_pgm(const Tensor& map, const std::string& path);

}  // namespace stylelab
