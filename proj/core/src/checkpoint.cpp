#include "nekmini/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "nekmini/error.hpp"

namespace nekmini {

namespace {

constexpr char kMagic[] = "NEKMINICKPT";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

template <class T>
void put(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T)))
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const std::int64_t npts = ck.num_elements * (ck.order + 1) * (ck.order + 1) * (ck.order + 1);
  for (const auto& f : ck.fields)
    if (static_cast<std::int64_t>(f.size()) != npts) throw FormatError("checkpoint field length mismatch");
  out.write(kMagic, kMagicLen);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int64_t>(out, ck.num_elements);
  put<std::int32_t>(out, ck.order);
  put<std::int32_t>(out, static_cast<std::int32_t>(ck.fields.size()));
  put<double>(out, ck.time);
  put<std::int64_t>(out, ck.step);
  for (const auto& f : ck.fields)
    for (double v : f) put<double>(out, v);
  if (!out) throw FormatError("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[kMagicLen];
  if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw FormatError("not a checkpoint file (bad magic)");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ck;
  ck.num_elements = get<std::int64_t>(in, "element count");
  ck.order = get<std::int32_t>(in, "order");
  const auto comps = get<std::int32_t>(in, "component count");
  if (ck.num_elements < 0 || ck.order < 1 || comps < 0 || comps > 64)
    throw FormatError("checkpoint header is corrupt");
  ck.time = get<double>(in, "time");
  ck.step = get<std::int64_t>(in, "step");
  const std::int64_t npts = ck.num_elements * (ck.order + 1) * (ck.order + 1) * (ck.order + 1);
  ck.fields.resize(comps);
  for (auto& f : ck.fields) {
    f.resize(npts);
    for (auto& v : f) v = get<double>(in, "field values");
  }
  return ck;
}

void write_checkpoint_file(const std::string& path, const Checkpoint& ck) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "' for writing");
  write_checkpoint(f, ck);
}

Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(f);
}

void check_checkpoint_shape(const Checkpoint& ck, std::int64_t num_elements, int order, int components) {
  if (ck.order != order)
    throw FormatError("checkpoint order mismatch: file has N=" + std::to_string(ck.order) + ", case uses N=" +
                      std::to_string(order));
  if (ck.num_elements != num_elements)
    throw FormatError("checkpoint element count mismatch: file has " + std::to_string(ck.num_elements) +
                      ", case uses " + std::to_string(num_elements));
  if (static_cast<int>(ck.fields.size()) != components)
    throw FormatError("checkpoint has " + std::to_string(ck.fields.size()) + " components, expected " +
                      std::to_string(components));
}

}  // namespace nekmini
