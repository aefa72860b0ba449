#include "accentnet/serialize.hpp"

#include "accentnet/io_util.hpp"

namespace accentnet {

namespace {
constexpr char kMagic[4] = {'T', 'N', 'S', '1'};
}

std::string encode_tensor_table(const std::vector<NamedTensorEntry>& entries) {
  std::string out;
  out.append(kMagic, 4);
  io::put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    io::put_u32(out, static_cast<std::uint32_t>(e.name.size()));
    out.append(e.name);
    io::put_u32(out, static_cast<std::uint32_t>(e.shape.size()));
    std::size_t numel = 1;
    for (std::size_t d : e.shape) {
      io::put_u32(out, static_cast<std::uint32_t>(d));
      numel *= d;
    }
    check_internal(numel == e.data.size(),
                   "tensor table entry '" + e.name + "' data/shape mismatch");
    for (float v : e.data) io::put_f32(out, v);
  }
  return out;
}

std::vector<NamedTensorEntry> decode_tensor_table(const std::string& bytes,
                                                  const std::string& source) {
  io::ByteReader r(bytes, source);
  if (r.raw(4, "magic") != std::string(kMagic, 4))
    data_error(source + ": bad magic, not a TNS1 tensor table");
  const std::uint32_t count = r.u32("entry count");
  std::vector<NamedTensorEntry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensorEntry e;
    const std::uint32_t name_len = r.u32("name length");
    e.name = r.raw(name_len, "name");
    const std::uint32_t rank = r.u32("rank");
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::uint32_t dim = r.u32("dimension");
      e.shape.push_back(dim);
      numel *= dim;
    }
    r.require(numel * 4, "tensor data for '" + e.name + "'");
    e.data.resize(numel);
    for (std::size_t j = 0; j < numel; ++j) e.data[j] = r.f32("tensor data");
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_tensor_table(const std::string& path, const std::vector<NamedTensorEntry>& entries) {
  io::write_file_atomic(path, encode_tensor_table(entries));
}

std::vector<NamedTensorEntry> read_tensor_table(const std::string& path) {
  return decode_tensor_table(io::read_file(path), path);
}

}  // namespace accentnet
