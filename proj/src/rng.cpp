#include "driftbound/rng.hpp"

#include <cmath>
#include <sstream>

namespace driftbound {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

void require_dim(std::size_t expected, Eigen::Index actual, const char* what) {
  if (actual < 0 || static_cast<std::size_t>(actual) != expected) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (expected " << expected << ", got " << actual << ")";
    throw InvalidArgument(msg.str());
  }
}

void require_finite(ConstVecRef x, const char* what) {
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite input");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index) {
  // FNV-1a over the tag keeps derived streams stable across builds.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return derive_seed(derive_seed(parent, h), index);
}

Vector standard_normal(Rng& rng, Eigen::Index n) {
  Vector v(n);
  fill_standard_normal(rng, v);
  return v;
}

}  // namespace driftbound
