#pragma once

#include <string>

#include "stylelab/model.hpp"
#include "stylelab/params.hpp"

namespace stylelab {

// SFCK container: magic "SFCK", u32 LE format version, u32 LE tensor count,
// then per tensor: u16 LE name length, UTF-8 name, u8 rank, u64 LE dims,
// f32 LE row-major data. Tensors are written in sorted-name order so
// save -> load -> save round-trips to identical bytes.
inline constexpr uint32_t kCheckpointVersion = 1;

// Model checkpoints carry theta, phi, the frozen autoencoder, the schedule
// (schedule.alphas / schedule.sigmas) and the vocabulary (meta.vocab_utf8).
void save_checkpoint(const TrainableWeights& w, const std::string& path);
TrainableWeights load_checkpoint(const std::string& path);

// Same container for bare tensor tables (e.g. the alignment tower).
void save_table(const ParamTable& table, const std::string& path);
ParamTable load_table(const std::string& path);

}  // namespace stylelab
