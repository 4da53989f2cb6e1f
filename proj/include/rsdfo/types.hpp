#pragma once

#include <string>
#include <string_view>

namespace rsdfo {

/// Which subspace iteration a quantity refers to: direct search or
/// model-based (simplex gradient) steps.
enum class Variant { ds, mb };

enum class PollMode { complete, opportunistic };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view s);

}  // namespace rsdfo
