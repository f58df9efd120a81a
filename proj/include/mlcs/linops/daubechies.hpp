#pragma once

#include <vector>

namespace mlcs {

// Orthonormal Daubechies low-pass filters with p vanishing moments (DB1..DB8),
// 2p taps, normalized so the taps sum to sqrt(2).
const std::vector<double>& daubechies_lowpass(int p);

constexpr int kMaxDaubechies = 8;

}  // namespace mlcs
