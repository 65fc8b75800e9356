#include "forgetlab/nn/snapshot_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "forgetlab/error.hpp"

namespace forgetlab::nn {

namespace {

const char kMagic[4] = {'F', 'L', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("'" + path + "': truncated container");
  return v;
}

std::string read_string(std::ifstream& in, const std::string& path) {
  auto len = read_raw<std::uint32_t>(in, path);
  if (len > (1u << 20)) throw FormatError("'" + path + "': unreasonable string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw FormatError("'" + path + "': truncated container");
  return s;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace

void save_snapshot(const std::string& path, const ParamSnapshot& snap) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(kMagic, 4);
  write_raw<std::uint32_t>(out, kVersion);
  write_raw<std::uint64_t>(out, snap.fingerprint);
  write_string(out, snap.label);
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(snap.entries.size()));
  for (const auto& [name, tensor] : snap.entries) {
    write_string(out, name);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(tensor.data()),
              static_cast<std::streamsize>(tensor.size() * sizeof(double)));
  }
  if (!out) throw FormatError("write failed for '" + path + "'");
}

ParamSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("'" + path + "': bad magic");
  auto version = read_raw<std::uint32_t>(in, path);
  if (version != kVersion) throw FormatError("'" + path + "': unsupported container version " + std::to_string(version));

  ParamSnapshot snap;
  snap.fingerprint = read_raw<std::uint64_t>(in, path);
  snap.label = read_string(in, path);
  auto count = read_raw<std::uint32_t>(in, path);
  for (std::uint32_t r = 0; r < count; ++r) {
    std::string name = read_string(in, path);
    auto ndim = read_raw<std::uint32_t>(in, path);
    if (ndim == 0 || ndim > 8) throw FormatError("'" + path + "': bad tensor rank");
    std::vector<std::size_t> shape(ndim);
    std::size_t total = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(read_raw<std::uint64_t>(in, path));
      total *= d;
    }
    std::vector<double> data(total);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw FormatError("'" + path + "': truncated tensor data");
    Tensor t;
    t = Tensor(shape);
    std::memcpy(t.data(), data.data(), total * sizeof(double));
    snap.entries.emplace_back(name, std::move(t));
  }
  return snap;
}

}  // namespace forgetlab::nn
