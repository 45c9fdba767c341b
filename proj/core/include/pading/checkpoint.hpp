#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pading/graph.hpp"

namespace pading {

// Flat binary container of named parameter matrices.
//
// Layout (little-endian):
//   magic   "PADING-CKPT-1\n"
//   u64     entry count
//   entry*  u32 name length, name bytes, u64 rows, u64 cols,
//           rows*cols f64 values (row-major)
inline constexpr const char kCheckpointMagic[] = "PADING-CKPT-1\n";

void save_checkpoint(const std::vector<std::pair<std::string, Param*>>& params,
                     const std::string& path);

std::map<std::string, Matrix> load_checkpoint(const std::string& path);

// Loads values into existing params; every name must be present with a
// matching shape.
void load_checkpoint_into(const std::vector<std::pair<std::string, Param*>>& params,
                          const std::string& path);

}  // namespace pading
