#pragma once

// Tensor files: a short text header, then raw little-endian two's complement
// words.
//
//   dslr-tensor 1
//   shape 16 10 10
//   width 16
//   frac 15
//   word 16
//   data
//   <binary payload>

#include <iosfwd>
#include <string>

#include "core/accel_sim.hpp"

namespace dslr::io {

// Word size is 16 for width <= 16, 32 for width <= 32, otherwise 64.
int word_bits_for(int width);

void write_tensor(std::ostream& out, const accel::Tensor& t);
accel::Tensor read_tensor(std::istream& in);

void save_tensor(const std::string& path, const accel::Tensor& t);
accel::Tensor load_tensor(const std::string& path);

}  // namespace dslr::io
