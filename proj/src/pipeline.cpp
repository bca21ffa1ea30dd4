#include "cubewright/pipeline.hpp"

#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

#include "cubewright/bounded_queue.hpp"
#include "cubewright/csv.hpp"
#include "cubewright/errors.hpp"

namespace cubewright::pipeline {

std::string_view to_string(StageId stage) {
  switch (stage) {
    case StageId::Ingest: return "ingest";
    case StageId::Clean: return "clean";
    case StageId::Load: return "load";
    case StageId::Cube: return "cube";
    case StageId::Analyze: return "analyze";
  }
  return "ingest";
}

std::string reports_to_json_text(const std::vector<StageReport>& reports, int indent) {
  nlohmann::json doc = nlohmann::json::array();
  for (const StageReport& rep : reports) {
    doc.push_back({{"stage", std::string(to_string(rep.stage))},
                   {"rows_in", rep.rows_in},
                   {"rows_out", rep.rows_out},
                   {"batches", rep.batches},
                   {"errors", rep.errors}});
  }
  return indent >= 0 ? doc.dump(indent) : doc.dump();
}

namespace {

using MessageQueue = BoundedQueue<Message>;

class Sender {
public:
  explicit Sender(MessageQueue& queue) : queue_(&queue) {}

  template <typename Body>
  bool send(Body&& body) {
    return queue_->push(Message{next_sequence_++, std::forward<Body>(body)});
  }

private:
  MessageQueue* queue_;
  std::uint64_t next_sequence_ = 0;
};

class Receiver {
public:
  explicit Receiver(MessageQueue& queue) : queue_(&queue) {}

  std::optional<Message> receive() {
    auto message = queue_->pop();
    if (message) {
      if (seen_any_ && message->sequence <= last_sequence_) {
        throw Error("message sequence is not strictly increasing");
      }
      last_sequence_ = message->sequence;
      seen_any_ = true;
    }
    return message;
  }

private:
  MessageQueue* queue_;
  std::uint64_t last_sequence_ = 0;
  bool seen_any_ = false;
};

using CancelAll = std::function<void()>;

void run_ingest(std::shared_ptr<std::ifstream> file, const Schema& schema,
                std::size_t batch_size, Sender out, StageReport& rep,
                const CancelAll& cancel_all) {
  CsvRowReader reader(*file, schema);
  std::vector<Record> batch;
  batch.reserve(batch_size);
  auto flush = [&]() -> bool {
    std::size_t n = batch.size();
    if (n == 0) return true;
    if (!out.send(RecordBatch{std::move(batch)})) return false;
    batch.clear();
    rep.rows_out += n;
    rep.batches += 1;
    return true;
  };

  for (;;) {
    std::optional<Record> record;
    try {
      record = reader.next();
    } catch (const CsvError& e) {
      rep.errors.push_back(e.what());
      out.send(AbortMessage{StageId::Ingest, e.what()});
      cancel_all();
      return;
    }
    if (!record) break;
    rep.rows_in += 1;
    batch.push_back(std::move(*record));
    if (batch.size() >= batch_size && !flush()) return;
  }
  if (!flush()) return;
  out.send(EndOfStream{});
}

void run_clean(const Schema& in_schema, const CleaningSpec& spec, Receiver in, Sender out,
               StageReport& rep, const CancelAll& cancel_all) {
  for (;;) {
    auto message = in.receive();
    if (!message) return;
    if (auto* batch = std::get_if<RecordBatch>(&message->body)) {
      rep.rows_in += batch->rows.size();
      try {
        Table chunk{in_schema, std::move(batch->rows)};
        Table cleaned = clean(chunk, spec);
        rep.rows_out += cleaned.rows.size();
        rep.batches += 1;
        if (!out.send(RecordBatch{std::move(cleaned.rows)})) return;
      } catch (const Error& e) {
        std::string what = "batch " + std::to_string(rep.batches) + ": " + e.what();
        rep.errors.push_back(what);
        out.send(AbortMessage{StageId::Clean, what});
        cancel_all();
        return;
      }
    } else if (std::holds_alternative<EndOfStream>(message->body)) {
      out.send(EndOfStream{});
      return;
    } else if (auto* abort = std::get_if<AbortMessage>(&message->body)) {
      out.send(std::move(*abort));
      return;
    }
  }
}

void run_load(const Schema& clean_schema, const std::optional<std::filesystem::path>& persist,
              Receiver in, Sender out, StageReport& rep, const CancelAll& cancel_all) {
  Table loaded{clean_schema, {}};
  for (;;) {
    auto message = in.receive();
    if (!message) return;
    if (auto* batch = std::get_if<RecordBatch>(&message->body)) {
      rep.rows_in += batch->rows.size();
      loaded.rows.insert(loaded.rows.end(), batch->rows.begin(), batch->rows.end());
      rep.rows_out += batch->rows.size();
      rep.batches += 1;
      if (!out.send(RecordBatch{std::move(batch->rows)})) return;
    } else if (std::holds_alternative<EndOfStream>(message->body)) {
      if (persist) {
        try {
          write_csv_file(loaded, *persist);
        } catch (const Error& e) {
          rep.errors.push_back(e.what());
          out.send(AbortMessage{StageId::Load, e.what()});
          cancel_all();
          return;
        }
      }
      out.send(EndOfStream{});
      return;
    } else if (auto* abort = std::get_if<AbortMessage>(&message->body)) {
      out.send(std::move(*abort));
      return;
    }
  }
}

void run_cube(const Schema& clean_schema, const CubeSpec& spec, Receiver in, Sender out,
              StageReport& rep, const CancelAll& cancel_all) {
  Table staging{clean_schema, {}};
  for (;;) {
    auto message = in.receive();
    if (!message) return;
    if (auto* batch = std::get_if<RecordBatch>(&message->body)) {
      rep.rows_in += batch->rows.size();
      rep.batches += 1;
      staging.rows.insert(staging.rows.end(), std::make_move_iterator(batch->rows.begin()),
                          std::make_move_iterator(batch->rows.end()));
    } else if (std::holds_alternative<EndOfStream>(message->body)) {
      try {
        Cube cube = build_cube(std::move(staging), spec.dimensions, spec.declared);
        rep.rows_out = cube.total();
        auto shared = std::make_shared<const Cube>(std::move(cube));
        if (!out.send(CubeHandoff{std::move(shared)})) return;
        out.send(EndOfStream{});
      } catch (const Error& e) {
        rep.errors.push_back(e.what());
        out.send(AbortMessage{StageId::Cube, e.what()});
        cancel_all();
      }
      return;
    } else if (auto* abort = std::get_if<AbortMessage>(&message->body)) {
      out.send(std::move(*abort));
      return;
    }
  }
}

void run_analyze(const std::vector<query::QueryAst>& queries, Receiver in, StageReport& rep,
                 RunResult& result) {
  std::shared_ptr<const cubewright::Cube> cube;
  for (;;) {
    auto message = in.receive();
    if (!message) return;
    if (auto* handoff = std::get_if<CubeHandoff>(&message->body)) {
      cube = handoff->cube;
      rep.batches += 1;
      rep.rows_in += cube->total();
    } else if (std::holds_alternative<EndOfStream>(message->body)) {
      if (!cube) {
        rep.errors.push_back("end of stream without a cube");
        result.failed = StageId::Analyze;
        result.failure = rep.errors.back();
        return;
      }
      for (std::size_t i = 0; i < queries.size(); ++i) {
        try {
          result.results.push_back(query::execute(queries[i], *cube));
          rep.rows_out += 1;
        } catch (const Error& e) {
          std::string what = "query " + std::to_string(i + 1) + ": " + e.what();
          rep.errors.push_back(what);
          result.failed = StageId::Analyze;
          result.failure = what;
          return;
        }
      }
      result.cube = cube;
      return;
    } else if (auto* abort = std::get_if<AbortMessage>(&message->body)) {
      result.failed = abort->origin;
      result.failure = abort->reason;
      return;
    }
  }
}

}  // namespace

RunResult run_pipeline(const Job& job) {
  if (job.batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  job.cleaning.validate();

  RunResult result;
  result.reports.resize(kStageOrder.size());
  for (std::size_t i = 0; i < kStageOrder.size(); ++i) {
    result.reports[i].stage = kStageOrder[i];
  }
  auto report_of = [&](StageId id) -> StageReport& {
    return result.reports[static_cast<std::size_t>(id)];
  };
  auto fail_stage = [&](StageId id, const std::string& what) -> RunResult {
    report_of(id).errors.push_back(what);
    result.failed = id;
    result.failure = what;
    return std::move(result);
  };

  // Pre-flight: open the source, derive both schemas, and validate the specs
  // against them so misconfiguration surfaces at the right stage.
  auto file = std::make_shared<std::ifstream>(job.csv_path);
  if (!*file) {
    return fail_stage(StageId::Ingest, "cannot open '" + job.csv_path.string() + "'");
  }
  Schema schema;
  try {
    std::string header;
    if (!std::getline(*file, header)) {
      throw CsvError(1, "missing header");
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();
    schema = parse_schema(header, job.type_hints);
  } catch (const Error& e) {
    return fail_stage(StageId::Ingest, e.what());
  }
  Schema clean_schema;
  try {
    clean_schema = cleaned_schema(schema, job.cleaning);
  } catch (const Error& e) {
    return fail_stage(StageId::Clean, e.what());
  }
  try {
    build_cube(Table{clean_schema, {}}, job.cube.dimensions, job.cube.declared);
  } catch (const Error& e) {
    return fail_stage(StageId::Cube, e.what());
  }

  const std::size_t capacity = job.queue_capacity < 1 ? 1 : job.queue_capacity;
  MessageQueue ingest_to_clean(capacity);
  MessageQueue clean_to_load(capacity);
  MessageQueue load_to_cube(capacity);
  MessageQueue cube_to_analyze(capacity);
  CancelAll cancel_all = [&] {
    ingest_to_clean.cancel();
    clean_to_load.cancel();
    load_to_cube.cancel();
    cube_to_analyze.cancel();
  };

  auto guarded = [&](StageId id, auto body) {
    return [&, id, body = std::move(body)]() mutable {
      try {
        body();
      } catch (const std::exception& e) {
        report_of(id).errors.push_back(std::string("unexpected: ") + e.what());
        cancel_all();
      }
    };
  };

  std::thread ingest(guarded(StageId::Ingest, [&] {
    run_ingest(file, schema, job.batch_size, Sender(ingest_to_clean),
               report_of(StageId::Ingest), cancel_all);
  }));
  std::thread cleaner(guarded(StageId::Clean, [&] {
    run_clean(schema, job.cleaning, Receiver(ingest_to_clean), Sender(clean_to_load),
              report_of(StageId::Clean), cancel_all);
  }));
  std::thread loader(guarded(StageId::Load, [&] {
    run_load(clean_schema, job.persist_clean, Receiver(clean_to_load), Sender(load_to_cube),
             report_of(StageId::Load), cancel_all);
  }));
  std::thread cuber(guarded(StageId::Cube, [&] {
    run_cube(clean_schema, job.cube, Receiver(load_to_cube), Sender(cube_to_analyze),
             report_of(StageId::Cube), cancel_all);
  }));
  std::thread analyzer(guarded(StageId::Analyze, [&] {
    run_analyze(job.queries, Receiver(cube_to_analyze), report_of(StageId::Analyze), result);
  }));

  ingest.join();
  cleaner.join();
  loader.join();
  cuber.join();
  analyzer.join();

  if (!result.failed) {
    for (const StageReport& rep : result.reports) {
      if (!rep.errors.empty()) {
        result.failed = rep.stage;
        result.failure = rep.errors.front();
        break;
      }
    }
  }
  return result;
}

}  // namespace cubewright::pipeline
