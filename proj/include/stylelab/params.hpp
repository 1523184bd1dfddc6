#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stylelab/tensor.hpp"

namespace stylelab {

// Named tensor table. std::map keeps iteration order deterministic, which
// the checkpoint format and the optimizer rely on.
using ParamTable = std::map<std::string, Tensor>;

const Tensor& table_get(const ParamTable& t, const std::string& name);
Tensor& table_get(ParamTable& t, const std::string& name);

// FNV-1a over the f32-serialized contents; used to pin down that frozen
// tables never change during personalization.
uint64_t table_checksum(const ParamTable& t);

bool table_all_finite(const ParamTable& t);
size_t table_param_count(const ParamTable& t);

}  // namespace stylelab
