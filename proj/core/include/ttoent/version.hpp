#pragma once

namespace ttoent {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace ttoent
