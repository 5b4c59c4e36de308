#include "lgeo/io/activation_file.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "lgeo/error.hpp"

namespace lgeo::io {

namespace {

constexpr std::uint64_t kFixedHeaderBytes = 20;
constexpr std::uint64_t kAlignment = 16;

template <class T>
T load_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

template <class T>
void store_le(std::vector<unsigned char>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void read_exact(std::istream& in, unsigned char* dst, std::uint64_t n, std::uint64_t offset,
                const char* what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::uint64_t>(in.gcount()) != n) {
    throw FormatError(std::string("truncated ") + what + ": expected " + std::to_string(n) +
                          " bytes, got " + std::to_string(in.gcount()),
                      static_cast<long long>(offset + static_cast<std::uint64_t>(in.gcount())));
  }
}

}  // namespace

std::uint64_t ActivationFileHeader::payload_offset() const noexcept {
  const std::uint64_t raw = kFixedHeaderBytes + model_id.size();
  return (raw + kAlignment - 1) / kAlignment * kAlignment;
}

std::uint64_t ActivationFileHeader::payload_bytes() const {
  const std::uint64_t cells = static_cast<std::uint64_t>(rows) * cols;
  if (cols != 0 && cells / cols != rows) throw FormatError("payload size overflows", 8);
  if (cells > std::numeric_limits<std::uint64_t>::max() / 4) throw FormatError("payload size overflows", 8);
  return cells * 4;
}

ActivationFileHeader read_activation_header(std::istream& in) {
  std::array<unsigned char, kFixedHeaderBytes> fixed{};
  read_exact(in, fixed.data(), fixed.size(), 0, "header");
  if (std::memcmp(fixed.data(), kActivationMagic, 4) != 0) throw FormatError("bad magic, expected LGA1", 0);
  ActivationFileHeader h;
  h.version = load_le<std::uint16_t>(fixed.data() + 4);
  h.dtype = load_le<std::uint16_t>(fixed.data() + 6);
  h.rows = load_le<std::uint32_t>(fixed.data() + 8);
  h.cols = load_le<std::uint32_t>(fixed.data() + 12);
  h.layer = load_le<std::uint16_t>(fixed.data() + 16);
  const auto id_len = load_le<std::uint16_t>(fixed.data() + 18);
  if (h.version != kActivationVersion) {
    throw FormatError("unsupported version " + std::to_string(h.version), 4);
  }
  if (h.dtype != kDtypeFloat32) throw FormatError("unsupported dtype code " + std::to_string(h.dtype), 6);
  std::string id(id_len, '\0');
  read_exact(in, reinterpret_cast<unsigned char*>(id.data()), id_len, kFixedHeaderBytes, "model id");
  h.model_id = std::move(id);
  const std::uint64_t pad = h.payload_offset() - kFixedHeaderBytes - id_len;
  std::array<unsigned char, kAlignment> skip{};
  read_exact(in, skip.data(), pad, kFixedHeaderBytes + id_len, "header padding");
  return h;
}

ActivationMatrix read_activations(std::istream& in) {
  const ActivationFileHeader h = read_activation_header(in);
  const std::uint64_t bytes = h.payload_bytes();
  std::vector<unsigned char> payload;
  // Grow in chunks so a lying header cannot force a huge allocation up front.
  constexpr std::uint64_t kChunk = 1u << 24;
  std::uint64_t done = 0;
  while (done < bytes) {
    const std::uint64_t n = std::min(kChunk, bytes - done);
    payload.resize(done + n);
    in.read(reinterpret_cast<char*>(payload.data() + done), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::uint64_t>(in.gcount());
    if (got != n) {
      throw FormatError("truncated payload: header declares " + std::to_string(bytes) +
                            " bytes, file holds " + std::to_string(done + got),
                        static_cast<long long>(h.payload_offset() + done + got));
    }
    done += n;
  }
  char extra = 0;
  if (in.read(&extra, 1); in.gcount() != 0) {
    throw FormatError("trailing bytes after payload",
                      static_cast<long long>(h.payload_offset() + bytes));
  }
  ActivationMatrix X{Matrix(h.rows, h.cols), h.layer, h.model_id};
  const unsigned char* p = payload.data();
  for (std::uint32_t r = 0; r < h.rows; ++r) {
    for (std::uint32_t c = 0; c < h.cols; ++c, p += 4) {
      X.data(r, c) = static_cast<double>(std::bit_cast<float>(load_le<std::uint32_t>(p)));
    }
  }
  return X;
}

ActivationMatrix read_activations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_activations(in);
}

void write_activations(const ActivationMatrix& X, std::ostream& out) {
  if (X.data.rows() > std::numeric_limits<std::uint32_t>::max() ||
      X.data.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("matrix too large for LGA1");
  }
  if (X.layer < 0 || X.layer > std::numeric_limits<std::uint16_t>::max()) {
    throw InputError("layer index does not fit in 16 bits");
  }
  if (X.model_id.size() > std::numeric_limits<std::uint16_t>::max()) throw InputError("model id too long");
  ActivationFileHeader h;
  h.rows = static_cast<std::uint32_t>(X.data.rows());
  h.cols = static_cast<std::uint32_t>(X.data.cols());
  h.layer = static_cast<std::uint16_t>(X.layer);
  h.model_id = X.model_id;

  std::vector<unsigned char> bytes;
  bytes.reserve(h.payload_offset() + h.payload_bytes());
  bytes.insert(bytes.end(), kActivationMagic, kActivationMagic + 4);
  store_le(bytes, h.version);
  store_le(bytes, h.dtype);
  store_le(bytes, h.rows);
  store_le(bytes, h.cols);
  store_le(bytes, h.layer);
  store_le(bytes, static_cast<std::uint16_t>(h.model_id.size()));
  bytes.insert(bytes.end(), h.model_id.begin(), h.model_id.end());
  bytes.resize(h.payload_offset(), 0);
  for (Eigen::Index r = 0; r < X.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < X.data.cols(); ++c) {
      store_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(X.data(r, c))));
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed");
}

void write_activations(const ActivationMatrix& X, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_activations(X, out);
}

}  // namespace lgeo::io
