#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace avsim::mobility {

// Semantic location codes. The narrow form packs a 3-bit zone index and a
// 3-bit in-zone location index into one 6-bit value, so codes within a zone
// differ only in the low bits and stay numerically close. Values 64 and 65
// are reserved sentinels and never collide with encoded codes.
inline constexpr uint16_t kInTransit = 64;
inline constexpr uint16_t kUnknown = 65;

inline constexpr const char* kInTransitLabel = "IN_TRANSIT";
inline constexpr const char* kUnknownLabel = "UNKNOWN";

struct LocationCode {
  uint8_t zone_bits;      // 0..7
  uint8_t location_bits;  // 0..7

  uint16_t value() const { return uint16_t(zone_bits) * 8u + location_bits; }

  std::string binary_string() const {
    std::string s(6, '0');
    uint16_t v = value();
    for (int i = 5; i >= 0; --i, v >>= 1) s[i] = char('0' + (v & 1));
    return s;
  }

  friend bool operator==(const LocationCode&, const LocationCode&) = default;
};

inline LocationCode encode(unsigned zone_index, unsigned location_index) {
  if (zone_index >= 8 || location_index >= 8)
    throw std::out_of_range("location code index out of range: zone " +
                            std::to_string(zone_index) + ", location " +
                            std::to_string(location_index));
  return LocationCode{uint8_t(zone_index), uint8_t(location_index)};
}

inline LocationCode decode(uint16_t value) {
  if (value >= 64) throw std::out_of_range("not an encoded location code");
  return LocationCode{uint8_t(value / 8), uint8_t(value % 8)};
}

// Environments with more than 8 zones or 8 locations per zone get a widened
// code page: same zone*width+location layout, width the smallest power of two
// holding the largest zone. Sentinels move past the last encodable value.
struct CodePage {
  uint32_t zone_count = 8;
  uint32_t width = 8;

  static CodePage fit(uint32_t zones, uint32_t max_locations_per_zone) {
    CodePage p;
    p.zone_count = zones < 8 ? 8 : zones;
    p.width = 8;
    while (p.width < max_locations_per_zone) p.width *= 2;
    return p;
  }

  uint32_t encode(uint32_t zone, uint32_t loc) const {
    if (zone >= zone_count || loc >= width)
      throw std::out_of_range("code page overflow");
    return zone * width + loc;
  }

  std::pair<uint32_t, uint32_t> decode(uint32_t v) const {
    return {v / width, v % width};
  }

  uint32_t in_transit() const { return zone_count * width; }
  uint32_t unknown() const { return zone_count * width + 1; }
};

}  // namespace avsim::mobility
