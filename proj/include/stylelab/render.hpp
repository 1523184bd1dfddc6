#pragma once

#include <string>

#include "stylelab/rng.hpp"
#include "stylelab/tensor.hpp"

namespace stylelab {

// One procedurally rendered 32x32 scene. Content words name what was drawn
// (they feed the prompt grammar), and person_mask marks person pixels for
// the attention analysis.
struct Scene {
    Tensor image;        // 3 x 32 x 32, [0,1]
    Tensor person_mask;  // 32 x 32, 1.0 on person pixels
    std::string person_word;      // empty for pure backgrounds
    std::string background_word;  // primary background object
    std::string color_word;       // dominant color word, may be empty
};

// Gradient/texture landscape with a primary object and 2-3 accent shapes.
Scene render_background_scene(Rng& rng);

// Articulated figure (head with eyes/mouth, torso, limbs, all features at
// least 3px) on a plain landscape. The figure covers a substantial part of
// the frame so person fidelity is resolvable at 32x32.
Scene render_person_scene(Rng& rng);

}  // namespace stylelab
