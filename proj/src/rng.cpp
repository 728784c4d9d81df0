#include "cso/rng.hpp"

namespace cso {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view cell_key,
                          std::uint64_t replication) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ hash_string(cell_key));
  return mix64(h ^ mix64(replication + 0x632be59bd9b4e019ULL));
}

}  // namespace cso
