#include "vpralign/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace vpralign {

namespace {

static_assert(std::endian::native == std::endian::little, "bundle I/O assumes a little-endian host");

template <typename T>
void put(std::vector<std::byte>& out, T value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T take(std::span<const std::byte> bytes, std::size_t& offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::byte> encode_bundle(const FeatureBundle& bundle, std::size_t width, std::size_t dim) {
  const Trajectory& frames = bundle.frames;
  if (!frames.empty() && (frames.width() != width || frames.dim() != dim)) {
    throw ShapeError("encode_bundle: frames are " + frames[0].shape_string());
  }
  if (frames.size() > UINT32_MAX || width > UINT16_MAX || dim > UINT32_MAX) {
    throw ConfigError("encode_bundle: dimensions exceed the header fields");
  }
  const std::size_t payload_bytes = frames.size() * width * dim * sizeof(float);
  std::vector<std::byte> out;
  out.reserve(kBundleHeaderBytes + payload_bytes + sizeof(std::uint64_t));
  out.insert(out.end(), {std::byte{'S'}, std::byte{'T'}, std::byte{'A'}, std::byte{'B'}});
  put<std::uint16_t>(out, kBundleVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(frames.size()));
  put<std::uint16_t>(out, static_cast<std::uint16_t>(width));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put<std::uint8_t>(out, bundle.projected ? 1 : 0);
  put<std::uint64_t>(out, bundle.projected ? bundle.seed : 0);
  for (const FeatureSequence& f : frames.frames()) {
    for (double v : f.values()) put<float>(out, static_cast<float>(v));
  }
  put<std::uint64_t>(out, fnv1a64(std::span(out).subspan(kBundleHeaderBytes, payload_bytes)));
  return out;
}

std::vector<std::byte> encode_bundle(const FeatureBundle& bundle) {
  return encode_bundle(bundle, bundle.frames.width(), bundle.frames.dim());
}

FeatureBundle decode_bundle(std::span<const std::byte> bytes) {
  if (bytes.size() < kBundleHeaderBytes + sizeof(std::uint64_t)) {
    throw FormatError("bundle truncated: " + std::to_string(bytes.size()) + " bytes");
  }
  if (std::memcmp(bytes.data(), "STAB", 4) != 0) throw FormatError("bundle magic is not STAB");
  std::size_t offset = 4;
  const auto version = take<std::uint16_t>(bytes, offset);
  if (version != kBundleVersion) throw FormatError("unsupported bundle version " + std::to_string(version));
  const std::size_t n = take<std::uint32_t>(bytes, offset);
  const std::size_t width = take<std::uint16_t>(bytes, offset);
  const std::size_t dim = take<std::uint32_t>(bytes, offset);
  const auto projected = take<std::uint8_t>(bytes, offset);
  const auto seed = take<std::uint64_t>(bytes, offset);
  if (projected > 1) throw FormatError("bundle projected flag must be 0 or 1");
  if (n > 0 && (width == 0 || dim == 0)) throw FormatError("bundle has frames but W or D is zero");

  const std::size_t payload_bytes = n * width * dim * sizeof(float);
  const std::size_t expected = kBundleHeaderBytes + payload_bytes + sizeof(std::uint64_t);
  if (bytes.size() != expected) {
    std::ostringstream msg;
    msg << "bundle size " << bytes.size() << " does not match header (expected " << expected << ")";
    throw FormatError(msg.str());
  }
  const auto payload = bytes.subspan(kBundleHeaderBytes, payload_bytes);
  std::size_t footer = kBundleHeaderBytes + payload_bytes;
  if (take<std::uint64_t>(bytes, footer) != fnv1a64(payload)) throw FormatError("bundle checksum mismatch");

  std::vector<FeatureSequence> frames;
  frames.reserve(n);
  std::size_t cursor = kBundleHeaderBytes;
  for (std::size_t f = 0; f < n; ++f) {
    std::vector<double> values(width * dim);
    for (double& v : values) v = take<float>(bytes, cursor);
    frames.emplace_back(width, dim, std::move(values), std::to_string(f));
  }
  FeatureBundle out;
  out.frames = Trajectory(std::move(frames));
  out.projected = projected == 1;
  out.seed = seed;
  return out;
}

void write_bundle(const std::string& path, const FeatureBundle& bundle) {
  const auto bytes = encode_bundle(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path);
}

FeatureBundle read_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_bundle(std::as_bytes(std::span(raw)));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void require_compatible(const FeatureBundle& reference, const FeatureBundle& query) {
  if (!reference.frames.empty() && !query.frames.empty() &&
      !reference.frames[0].same_shape(query.frames[0])) {
    throw ShapeError("bundle shapes differ: reference " + reference.frames[0].shape_string() + ", query " +
                     query.frames[0].shape_string());
  }
  if (reference.projected != query.projected || reference.seed != query.seed) {
    auto describe = [](const FeatureBundle& b) {
      return b.projected ? "projected with seed " + std::to_string(b.seed) : std::string("unprojected");
    };
    throw SeedMismatchError("projection seed mismatch: reference " + describe(reference) + ", query " +
                            describe(query));
  }
}

std::vector<std::int64_t> read_ground_truth(std::istream& in) {
  std::vector<std::int64_t> truth;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "query_index,reference_index") continue;
    }
    std::istringstream row(line);
    long long q = 0;
    long long r = 0;
    char comma = 0;
    if (!(row >> q >> comma >> r) || comma != ',' || !(row >> std::ws).eof()) {
      throw FormatError("ground truth line " + std::to_string(line_no) + ": expected 'query,reference'");
    }
    if (q != static_cast<long long>(truth.size())) {
      throw FormatError("ground truth line " + std::to_string(line_no) + ": query index " + std::to_string(q) +
                        " breaks the 0, 1, 2, ... sequence");
    }
    if (r < -1) throw FormatError("ground truth line " + std::to_string(line_no) + ": reference index < -1");
    truth.push_back(r);
  }
  return truth;
}

std::vector<std::int64_t> read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_ground_truth(in);
}

void write_ground_truth(std::ostream& out, const std::vector<std::int64_t>& truth) {
  out << "query_index,reference_index\n";
  for (std::size_t q = 0; q < truth.size(); ++q) out << q << ',' << truth[q] << '\n';
}

}  // namespace vpralign
