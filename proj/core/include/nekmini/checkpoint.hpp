#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nekmini {

// Binary restart file: magic NEKMINICKPT, u32 version, i64 E, i32 N, i32
// component count, f64 time, i64 step, then each component's E*(N+1)^3
// little-endian binary64 values, element-major.
struct Checkpoint {
  std::int64_t num_elements = 0;
  int order = 0;
  double time = 0.0;
  std::int64_t step = 0;
  std::vector<std::vector<double>> fields;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& in);
void write_checkpoint_file(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint_file(const std::string& path);

// Throws FormatError unless the checkpoint matches the expected shape.
void check_checkpoint_shape(const Checkpoint& ck, std::int64_t num_elements, int order, int components);

}  // namespace nekmini
