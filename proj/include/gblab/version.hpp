#pragma once

namespace gblab {

// Semantic version of the library + CLI, and the revision of the formula
// map (bumped whenever any evaluated closed form or threshold changes).
inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kFormulaMapRevision = "fm-3";

inline constexpr const char* kVersionLine = "gblab 1.0.0 (formula map fm-3)";

}  // namespace gblab
