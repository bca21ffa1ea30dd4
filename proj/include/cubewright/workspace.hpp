#pragma once

#include <filesystem>

#include "cubewright/clean.hpp"
#include "cubewright/pipeline.hpp"

namespace cubewright {

/// Directory-backed workspace: one dataset plus one cube definition,
/// described by a workspace.json config:
///
///   {
///     "schema": {"DATE": "date", "AGE": "integer"},
///     "cleaning": {"keep": [...], "synonyms": {...}, "on_missing": "error"},
///     "dimensions": ["DATE", "MARITAL_STATUS", "TYPE_OF_CAKE"],
///     "declared_members": {"MARITAL_STATUS": ["SINGLE", "MARRIED", "WIDOWED"]},
///     "files": {"raw": "raw.csv", "clean": "clean.csv", "cube": "cube.json"}
///   }
///
/// "files" is optional and defaults as shown; paths resolve relative to the
/// workspace directory.
struct Workspace {
  std::filesystem::path dir;
  TypeHints hints;
  CleaningSpec cleaning;
  pipeline::CubeSpec cube;
  std::filesystem::path raw_path;
  std::filesystem::path clean_path;
  std::filesystem::path cube_path;

  /// Loads <dir>/workspace.json; throws ConfigError with a clear message on
  /// a missing or malformed config.
  static Workspace load(const std::filesystem::path& dir);
};

}  // namespace cubewright
