#pragma once

namespace qcs {

inline constexpr const char* kArtifactName = "qcs";
inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace qcs
