#pragma once

#include <filesystem>
#include <string>

#include "chtn/network.hpp"

namespace chtn {

// Checkpoint layout, all little-endian:
//
//   offset  field
//   0       "CHTNCKPT"                     8 bytes
//   8       u32 format version (1)
//   12      u64 d_img_src, d_img_tgt, d_txt, hidden, c_src, c_tgt
//   60      u32 ablation (0 full, 1 only-cross, 2 no-share, 3 no-src-sp)
//   64      u64 parameter generation
//   72      u64 tensor count (20)
//   80      per tensor, in ParamSet::visit order:
//             u64 rows, u64 cols, rows*cols f64 row-major
//
// Shapes are checked against the header on load.
std::string encode_checkpoint(const Params& params);
Params decode_checkpoint(const std::string& bytes, const std::string& origin = "<memory>");

void save_checkpoint(const std::filesystem::path& path, const Params& params);
Params load_checkpoint(const std::filesystem::path& path);

}  // namespace chtn
