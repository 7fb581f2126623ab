#pragma once

#include <cstdint>
#include <iosfwd>

#include "fasisac/adam.hpp"
#include "fasisac/mlp.hpp"

namespace fasisac {

// Binary checkpoint layout (little-endian, native doubles):
//   header: 8-byte magic "FASCKPT\n", u32 format version
//   mlp block: u32 layer count L+1, i32 dims[L+1], u8 output activation,
//              f64 output scale, i32 late_concat_dim, then per layer
//              (u32 rows, u32 cols, f64 weights column-major,
//               u32 len, f64 biases)
//   adam block: f64 lr/beta1/beta2/epsilon, u64 step count, then the four
//               moment stacks dumped like the weight/bias arrays above
// Writers compose header + blocks; see save/load in ddpg for the full agent
// file. All reads validate shapes and throw ConfigError on malformed input.

inline constexpr char kCheckpointMagic[8] = {'F', 'A', 'S', 'C', 'K', 'P', 'T', '\n'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint_header(std::ostream& os);
// Returns the format version; throws ConfigError on bad magic or a version
// this build cannot read.
std::uint32_t read_checkpoint_header(std::istream& is);

void save_mlp(std::ostream& os, const Mlp& net);
Mlp load_mlp(std::istream& is);

void save_adam_state(std::ostream& os, const AdamState& st);
AdamState load_adam_state(std::istream& is);

}  // namespace fasisac
