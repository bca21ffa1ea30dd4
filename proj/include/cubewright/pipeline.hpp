#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cubewright/clean.hpp"
#include "cubewright/cube.hpp"
#include "cubewright/query.hpp"

namespace cubewright::pipeline {

/// Fixed linear stage order: Ingest -> Clean -> Load -> Cube -> Analyze.
enum class StageId { Ingest, Clean, Load, Cube, Analyze };

inline constexpr std::array<StageId, 5> kStageOrder = {
    StageId::Ingest, StageId::Clean, StageId::Load, StageId::Cube, StageId::Analyze};

std::string_view to_string(StageId stage);

struct StageReport {
  StageId stage = StageId::Ingest;
  std::uint64_t rows_in = 0;
  std::uint64_t rows_out = 0;
  std::uint64_t batches = 0;
  std::vector<std::string> errors;
};

std::string reports_to_json_text(const std::vector<StageReport>& reports, int indent = -1);

struct RecordBatch {
  std::vector<Record> rows;
};

struct CubeHandoff {
  std::shared_ptr<const cubewright::Cube> cube;
};

struct EndOfStream {};

struct AbortMessage {
  StageId origin = StageId::Ingest;
  std::string reason;
};

/// Typed inter-stage message. EndOfStream is the final non-abort message on
/// any channel; sequence numbers strictly increase per channel. Record
/// batches flow between the record stages; the built cube rides the
/// Cube -> Analyze edge.
struct Message {
  std::uint64_t sequence = 0;
  std::variant<RecordBatch, CubeHandoff, EndOfStream, AbortMessage> body;
};

struct CubeSpec {
  std::vector<std::string> dimensions;
  DeclaredMembers declared;
};

struct Job {
  std::filesystem::path csv_path;
  TypeHints type_hints;
  CleaningSpec cleaning;
  CubeSpec cube;
  std::vector<query::QueryAst> queries;
  std::size_t batch_size = 64;
  std::size_t queue_capacity = 16;
  /// When set, the Load stage persists the cleaned table here.
  std::optional<std::filesystem::path> persist_clean;
};

struct RunResult {
  std::vector<query::QueryResult> results;    // one per query, in order
  std::vector<StageReport> reports;           // one per stage, in stage order
  std::shared_ptr<const cubewright::Cube> cube;  // null when the run failed
  std::optional<StageId> failed;
  std::string failure;

  bool ok() const { return !failed.has_value(); }
};

/// Runs the staged pipeline: each stage is an independent worker, adjacent
/// stages communicate only through order-preserving bounded queues, and the
/// call returns after all stages settle. Results are identical to the
/// sequential composition parse -> clean -> build_cube -> execute for every
/// batch size. A stage error aborts everything downstream and is surfaced in
/// `failed`/`failure`. Throws ConfigError only for invalid job parameters.
RunResult run_pipeline(const Job& job);

}  // namespace cubewright::pipeline
