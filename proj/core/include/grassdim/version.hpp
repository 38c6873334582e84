#pragma once

namespace grassdim {

/// Toolkit version string, embedded in every persisted report so results
/// can be traced back to the code that produced them.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace grassdim
