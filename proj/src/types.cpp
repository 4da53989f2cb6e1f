#include "rsdfo/types.hpp"

#include <string>

#include "rsdfo/errors.hpp"

namespace rsdfo {

std::string_view to_string(Variant v) noexcept {
  return v == Variant::ds ? "ds" : "mb";
}

Variant parse_variant(std::string_view s) {
  if (s == "ds") return Variant::ds;
  if (s == "mb") return Variant::mb;
  throw std::invalid_argument("unknown variant '" + std::string(s) +
                              "' (expected ds or mb)");
}

}  // namespace rsdfo
