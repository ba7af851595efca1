#include "kgalign/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace kgalign {

namespace {

const char kMagic[8] = {'K', 'G', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::map<std::string, Tensor>& params,
                     bool float32) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  os.write(kMagic, 8);
  put_u32(os, static_cast<uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    put_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<uint32_t>(t.rows));
    put_u32(os, static_cast<uint32_t>(t.cols));
    put_u32(os, float32 ? 1u : 0u);
    if (float32) {
      for (double d : t.data) {
        uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(d));
        put_u32(os, bits);
      }
    } else {
      for (double d : t.data) put_u64(os, std::bit_cast<uint64_t>(d));
    }
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
  uint32_t count = get_u32(is);
  std::map<std::string, Tensor> out;
  for (uint32_t k = 0; k < count; ++k) {
    uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    int rows = static_cast<int>(get_u32(is));
    int cols = static_cast<int>(get_u32(is));
    uint32_t dtype = get_u32(is);
    Tensor t(rows, cols);
    if (dtype == 1) {
      for (auto& d : t.data) d = static_cast<double>(std::bit_cast<float>(get_u32(is)));
    } else if (dtype == 0) {
      for (auto& d : t.data) d = std::bit_cast<double>(get_u64(is));
    } else {
      throw std::runtime_error("checkpoint: unknown dtype in '" + path + "'");
    }
    if (!is) throw std::runtime_error("checkpoint: truncated file '" + path + "'");
    out.emplace(std::move(name), std::move(t));
  }
  return out;
}

}  // namespace kgalign
