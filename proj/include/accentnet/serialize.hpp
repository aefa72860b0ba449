#ifndef ACCENTNET_SERIALIZE_HPP
#define ACCENTNET_SERIALIZE_HPP

#include <string>
#include <vector>

#include "accentnet/tensor.hpp"

namespace accentnet {

// "TNS1" named-tensor table: magic, u32 entry count, then per entry
// u32 name length + UTF-8 name, u32 rank, u32 dims, f32 row-major data.
// All integers and floats little-endian.

struct NamedTensorEntry {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

std::string encode_tensor_table(const std::vector<NamedTensorEntry>& entries);
std::vector<NamedTensorEntry> decode_tensor_table(const std::string& bytes,
                                                  const std::string& source);

void write_tensor_table(const std::string& path, const std::vector<NamedTensorEntry>& entries);
std::vector<NamedTensorEntry> read_tensor_table(const std::string& path);

}  // namespace accentnet

#endif
