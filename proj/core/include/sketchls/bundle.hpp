#ifndef SKETCHLS_BUNDLE_HPP
#define SKETCHLS_BUNDLE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "sketchls/data.hpp"
#include "sketchls/problem.hpp"

namespace sketchls {

// Serialized problem + oracle. Matrices are stored inline as base64 of
// little-endian 64-bit floats in row-major order.
struct Bundle {
  LSProblem problem;
  Oracle oracle;
  std::optional<Matrix> x_gt;
  std::uint64_t seed = 0;
  std::string source;  // "synthetic", "lowrank", "csv"
};

void save_bundle(const std::string& path, const Bundle& bundle);
Bundle load_bundle(const std::string& path);

namespace detail {
std::string base64_encode(const unsigned char* data, std::size_t len);
std::string base64_decode(const std::string& text);
}  // namespace detail

}  // namespace sketchls

#endif
