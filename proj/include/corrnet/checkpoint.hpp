#pragma once

#include <filesystem>
#include <iosfwd>

#include "corrnet/neural.hpp"

namespace corrnet {

// Portable text checkpoint, exact round trip (values stored as hex floats):
//
//   corrnet-checkpoint 1
//   dims <d> <h> <m>
//   seed <seed>
//   tensor <name> <rows> <cols>
//   <row-major values, one matrix row per line>
//   ...
void write_checkpoint(const neural::ModelParams& params, std::ostream& out);
neural::ModelParams read_checkpoint(std::istream& in, const std::string& source = "<stream>");

void save_checkpoint(const neural::ModelParams& params, const std::filesystem::path& path);
neural::ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace corrnet
