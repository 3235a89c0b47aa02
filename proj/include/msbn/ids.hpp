#pragma once

#include <string>
#include <string_view>

namespace msbn {

// Orders identifiers so that embedded digit runs compare numerically:
// "C2" < "C10", "v5" < "v10". Used for every "smallest clique/node id"
// tie-break. Variables are ordered with plain string comparison instead.
bool natural_less(std::string_view a, std::string_view b);

struct NaturalLess {
  bool operator()(std::string_view a, std::string_view b) const { return natural_less(a, b); }
};

}  // namespace msbn
