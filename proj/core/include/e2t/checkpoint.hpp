#pragma once

#include <iosfwd>
#include <string>

#include "e2t/tape.hpp"

namespace e2t {

// Binary checkpoint layout, little-endian throughout:
//   magic "E2T1"
//   u64 tensor count
//   per tensor: u32 name length, UTF-8 name, u32 rank,
//               u64 per dimension, f64 per value (row-major)
// Tensors are written in name order.
void save_checkpoint(const ParamMap& params, const std::string& path);
void save_checkpoint(const ParamMap& params, std::ostream& out);

ParamMap load_checkpoint(const std::string& path);
ParamMap load_checkpoint(std::istream& in);

}  // namespace e2t
