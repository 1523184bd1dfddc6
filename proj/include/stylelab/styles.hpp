#pragma once

#include <map>
#include <string>
#include <vector>

#include "stylelab/tensor.hpp"

namespace stylelab {

// A procedural target style: a pure function of (image, parameters).
// idempotent declares whether applying the transform twice with the same
// parameters equals applying it once; each transform's class is pinned by a
// test.
struct StyleTransformSpec {
    std::string name;
    std::map<std::string, double> parameters;
    bool idempotent = false;
};

const std::vector<std::string>& style_names();

// Defaults for a named style; throws std::invalid_argument for unknown
// names or out-of-range parameter overrides.
StyleTransformSpec make_style(const std::string& name);
StyleTransformSpec make_style(const std::string& name,
                              const std::map<std::string, double>& overrides);

Tensor apply_style(const StyleTransformSpec& spec, const Tensor& image);

// Auxiliary style paired with each target by default (realism_analog for the
// pixelation target; painting-like analogs elsewhere).
std::string default_aux_style(const std::string& target_style);

}  // namespace stylelab
