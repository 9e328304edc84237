#pragma once

#include <span>

namespace uwbem {

// Scaling filter of the symmlet with `order` vanishing moments (2*order taps),
// normalized so that its squared taps sum to one. Empty span when unsupported.
std::span<const double> symmlet_filter(int order);

}  // namespace uwbem
