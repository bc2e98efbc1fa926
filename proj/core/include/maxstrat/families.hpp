#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "maxstrat/system.hpp"

namespace maxstrat {

/// Parametric array traversals. `dims` nested index loops over [0, 10];
/// size s adds s Booleans: one control flag (direction for one dimension,
/// completion otherwise) and s-1 marker flags that every step may toggle.
TransitionSystem array_traversal(std::size_t dims, std::size_t size);

/// Names accepted by make_family: array1d, array2d, array3d.
const std::vector<std::string>& family_names();
/// Throws UsageError on an unknown name or a size of 0.
TransitionSystem make_family(std::string_view name, std::size_t size);

}  // namespace maxstrat
