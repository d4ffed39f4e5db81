#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "segrekin/app.hpp"
#include "segrekin/error.hpp"

namespace segrekin {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& f, const std::string& path) {
  T v{};
  if (!f.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(ErrorCode::Io, "truncated snapshot '" + path + "'");
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const std::vector<std::uint64_t>& dims, const std::vector<double>& data) {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  if (n != data.size()) throw Error(ErrorCode::InvalidArgument, "snapshot dims do not match payload size");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot write snapshot '" + path + "'");
  f.write(kSnapshotMagic, 8);
  put<std::uint32_t>(f, kSnapshotVersion);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put<std::uint64_t>(f, d);
  put<std::uint8_t>(f, kDtypeF64);
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!f) throw Error(ErrorCode::Io, "failed writing snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read snapshot '" + path + "'");
  char magic[8];
  if (!f.read(magic, 8) || std::memcmp(magic, kSnapshotMagic, 8) != 0)
    throw Error(ErrorCode::Io, "'" + path + "' is not a snapshot (bad magic)");
  auto version = get<std::uint32_t>(f, path);
  if (version != kSnapshotVersion) throw Error(ErrorCode::Io, "unsupported snapshot version " + std::to_string(version));
  auto rank = get<std::uint32_t>(f, path);
  if (rank > 16) throw Error(ErrorCode::Io, "snapshot rank " + std::to_string(rank) + " is implausible");
  Snapshot s;
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    s.dims.push_back(get<std::uint64_t>(f, path));
    n *= s.dims.back();
  }
  auto dtype = get<std::uint8_t>(f, path);
  if (dtype != kDtypeF64) throw Error(ErrorCode::Io, "unsupported snapshot dtype " + std::to_string(dtype));
  s.data.resize(n);
  if (!f.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw Error(ErrorCode::Io, "truncated snapshot '" + path + "'");
  if (f.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::Io, "trailing bytes in snapshot '" + path + "'");
  return s;
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot hash '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Internal, "SHA-256 initialisation failed");
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(f.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace segrekin
