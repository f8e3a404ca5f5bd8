#pragma once

// Feature bundle and ground-truth table files.
//
// Bundle layout, all little-endian, no padding:
//   "STAB"  u16 version  u32 n  u16 W  u32 D  u8 projected  u64 seed
//   n*W*D f32 payload (frame, then position, then channel)
//   u64 FNV-1a checksum of the payload bytes
// Frames are held as doubles in memory and stored as f32, so values that
// are not representable as f32 are rounded on write.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpralign/core.hpp"

namespace vpralign {

inline constexpr std::uint16_t kBundleVersion = 1;
inline constexpr std::size_t kBundleHeaderBytes = 25;

/// Unreadable, truncated or corrupt file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two bundles were projected with different seeds (or only one was).
class SeedMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeatureBundle {
  Trajectory frames;
  bool projected = false;
  /// Projection seed; zero when unprojected.
  std::uint64_t seed = 0;
};

std::uint64_t fnv1a64(std::span<const std::byte> bytes);

std::vector<std::byte> encode_bundle(const FeatureBundle& bundle, std::size_t width, std::size_t dim);
std::vector<std::byte> encode_bundle(const FeatureBundle& bundle);
FeatureBundle decode_bundle(std::span<const std::byte> bytes);

void write_bundle(const std::string& path, const FeatureBundle& bundle);
FeatureBundle read_bundle(const std::string& path);

/// Throws ShapeError on differing (W, D) and SeedMismatchError when the
/// projection flag or seed differ.
void require_compatible(const FeatureBundle& reference, const FeatureBundle& query);

/// "query_index,reference_index" rows with -1 for "no true match".
/// Lines starting with '#' are comments. Query indices must run 0, 1, 2, ...
std::vector<std::int64_t> read_ground_truth(std::istream& in);
std::vector<std::int64_t> read_ground_truth(const std::string& path);
void write_ground_truth(std::ostream& out, const std::vector<std::int64_t>& truth);

}  // namespace vpralign
