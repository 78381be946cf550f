#pragma once

namespace shapelets {

inline constexpr const char* kVersion = "0.1.0";

// File format versions; loaders reject anything newer.
inline constexpr int kDatasetCsvVersion = 1;
inline constexpr int kShapeletJsonVersion = 1;
inline constexpr int kModelJsonVersion = 1;
inline constexpr int kManifestJsonVersion = 1;

}  // namespace shapelets
