#pragma once

// Little-endian primitive encoding shared by the model readers and writers.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "drfi/error.hpp"

namespace drfi::binary {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}
inline void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}
inline void put_i32(std::ostream& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }
inline void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }
inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void require(std::istream& in, const char* what) {
  if (!in) throw DataError(std::string("truncated model data while reading ") + what);
}
inline std::uint64_t get_u64(std::istream& in, const char* what) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  require(in, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}
inline std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  require(in, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}
inline std::int32_t get_i32(std::istream& in, const char* what) {
  return static_cast<std::int32_t>(get_u32(in, what));
}
inline std::uint8_t get_u8(std::istream& in, const char* what) {
  const int c = in.get();
  require(in, what);
  return static_cast<std::uint8_t>(c);
}
inline double get_f64(std::istream& in, const char* what) { return std::bit_cast<double>(get_u64(in, what)); }

}  // namespace drfi::binary
