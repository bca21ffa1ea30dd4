#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cubewright/csv.hpp"
#include "cubewright/errors.hpp"
#include "cubewright/pipeline.hpp"
#include "cubewright/query.hpp"
#include "cubewright/render.hpp"
#include "cubewright/workspace.hpp"

namespace {

using namespace cubewright;

TypeHints merge_type_flags(TypeHints hints, const std::vector<std::string>& flags) {
  for (const std::string& flag : flags) {
    std::size_t eq = flag.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--type expects NAME=TYPE, got '" + flag + "'");
    }
    auto type = column_type_from_string(flag.substr(eq + 1));
    if (!type) {
      throw ConfigError("unknown column type in '" + flag + "'");
    }
    hints[normalize_name(flag.substr(0, eq))] = *type;
  }
  return hints;
}

int cmd_ingest(const Workspace& ws, const std::string& input,
               const std::vector<std::string>& type_flags, bool lenient) {
  TypeHints hints = merge_type_flags(ws.hints, type_flags);
  if (lenient) {
    CsvReadResult result = load_csv_file_lenient(input, hints);
    write_csv_file(result.table, ws.raw_path);
    std::cout << result.table.num_rows() << " rows, " << result.table.num_columns() << " columns";
    if (!result.skipped.empty()) {
      std::cout << " (" << result.skipped.size() << " rows skipped)";
    }
    std::cout << "\n";
    for (const SkippedRow& skipped : result.skipped) {
      std::cerr << "skipped " << skipped.reason << "\n";
    }
  } else {
    Table table = load_csv_file(input, hints);
    write_csv_file(table, ws.raw_path);
    std::cout << table.num_rows() << " rows, " << table.num_columns() << " columns\n";
  }
  return 0;
}

Table load_raw(const Workspace& ws) {
  if (!std::filesystem::exists(ws.raw_path)) {
    throw ConfigError("raw table '" + ws.raw_path.string() + "' not found; run ingest first");
  }
  return load_csv_file(ws.raw_path, ws.hints);
}

int cmd_clean(const Workspace& ws) {
  Table cleaned = clean(load_raw(ws), ws.cleaning);
  write_csv_file(cleaned, ws.clean_path);
  std::cout << cleaned.num_rows() << " rows, " << cleaned.num_columns() << " columns -> "
            << ws.clean_path.string() << "\n";
  return 0;
}

Table load_cleaned(const Workspace& ws) {
  if (std::filesystem::exists(ws.clean_path)) {
    return load_csv_file(ws.clean_path, ws.hints);
  }
  return clean(load_raw(ws), ws.cleaning);
}

int cmd_cube(const Workspace& ws) {
  Cube cube = build_cube(load_cleaned(ws), ws.cube.dimensions, ws.cube.declared);
  std::ofstream out(ws.cube_path);
  if (!out) {
    throw ConfigError("cannot write '" + ws.cube_path.string() + "'");
  }
  out << cube.to_json_text(2) << "\n";
  std::cout << cube.dims().size() << " dimensions, " << cube.cells().size()
            << " stored cells, total " << cube.total() << " -> " << ws.cube_path.string() << "\n";
  return 0;
}

int cmd_query(const Workspace& ws, const std::string& text, RenderFormat format,
              bool with_report, std::size_t batch_size) {
  auto outcome = query::parse_query(text);
  if (const auto* error = std::get_if<query::ParseError>(&outcome)) {
    std::cerr << "error: " << error->render(text) << "\n";
    return 1;
  }
  if (!std::filesystem::exists(ws.raw_path)) {
    throw ConfigError("raw table '" + ws.raw_path.string() + "' not found; run ingest first");
  }

  pipeline::Job job;
  job.csv_path = ws.raw_path;
  job.type_hints = ws.hints;
  job.cleaning = ws.cleaning;
  job.cube = ws.cube;
  job.queries = {std::get<query::QueryAst>(outcome)};
  job.batch_size = batch_size;
  pipeline::RunResult run = pipeline::run_pipeline(job);

  if (with_report) {
    std::cerr << pipeline::reports_to_json_text(run.reports, 2) << "\n";
  }
  if (!run.ok()) {
    std::cerr << "error in " << pipeline::to_string(*run.failed) << " stage: " << run.failure
              << "\n";
    return 1;
  }
  std::cout << render_result(run.results.front(), format);
  return 0;
}

int cmd_repl(const Workspace& ws, RenderFormat format) {
  const Cube initial = build_cube(load_cleaned(ws), ws.cube.dimensions, ws.cube.declared);
  Cube current = initial;
  const bool interactive = isatty(fileno(stdin)) != 0;

  std::string line;
  for (;;) {
    if (interactive) {
      std::cout << "> " << std::flush;
    }
    if (!std::getline(std::cin, line)) break;
    std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    if (trimmed == ":quit" || trimmed == ":q") break;
    if (trimmed == ":reset") {
      current = initial;
      std::cout << "cube reset\n";
      continue;
    }

    auto outcome = query::parse_query(trimmed);
    if (const auto* error = std::get_if<query::ParseError>(&outcome)) {
      std::cout << "error: " << error->render(trimmed) << "\n";
      continue;
    }
    try {
      query::QueryResult result = query::execute(std::get<query::QueryAst>(outcome), current);
      std::cout << render_result(result, format);
      if (auto* cube = std::get_if<Cube>(&result)) {
        current = std::move(*cube);
      }
    } catch (const Error& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_report(const Workspace& ws, std::size_t batch_size) {
  if (!std::filesystem::exists(ws.raw_path)) {
    throw ConfigError("raw table '" + ws.raw_path.string() + "' not found; run ingest first");
  }
  pipeline::Job job;
  job.csv_path = ws.raw_path;
  job.type_hints = ws.hints;
  job.cleaning = ws.cleaning;
  job.cube = ws.cube;
  job.batch_size = batch_size;
  pipeline::RunResult run = pipeline::run_pipeline(job);
  std::cout << pipeline::reports_to_json_text(run.reports, 2) << "\n";
  if (!run.ok()) {
    std::cerr << "error in " << pipeline::to_string(*run.failed) << " stage: " << run.failure
              << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubewright - in-memory OLAP data-cube engine"};
  app.require_subcommand(1);

  std::string workspace_dir;
  std::string format_text = "pretty";
  bool with_report = false;
  std::size_t batch_size = 64;
  app.add_option("-w,--workspace", workspace_dir, "workspace directory (workspace.json inside)")
      ->envname("CUBEWRIGHT_WORKSPACE")
      ->required();
  app.add_option("-f,--format", format_text, "output format")
      ->check(CLI::IsMember({"pretty", "csv", "json"}))
      ->capture_default_str();
  app.add_flag("--report", with_report, "print stage reports (JSON) to stderr");
  app.add_option("--batch-size", batch_size, "pipeline batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "parse an order CSV into the workspace raw table");
  std::string input;
  std::vector<std::string> type_flags;
  bool lenient = false;
  ingest->add_option("input", input, "CSV file to ingest")->required();
  ingest->add_option("--type", type_flags, "column type override, NAME=date|integer|categorical|text");
  ingest->add_flag("--lenient", lenient, "skip malformed rows instead of failing");

  auto* clean_cmd = app.add_subcommand("clean", "project and canonicalize the raw table");
  auto* cube_cmd = app.add_subcommand("cube", "build the cube and export it as JSON");
  auto* query_cmd = app.add_subcommand("query", "run a query through the staged pipeline");
  std::string query_text;
  query_cmd->add_option("text", query_text, "query, e.g. \"slice TYPE_OF_CAKE=WEDDING | crosstab MARITAL_STATUS x DATE\"")
      ->required();
  auto* repl_cmd = app.add_subcommand("repl", "interactive query session (:quit, :reset)");
  auto* report_cmd = app.add_subcommand("report", "run the pipeline and print stage telemetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RenderFormat format = *render_format_from_string(format_text);
    Workspace ws = Workspace::load(workspace_dir);
    if (*ingest) return cmd_ingest(ws, input, type_flags, lenient);
    if (*clean_cmd) return cmd_clean(ws);
    if (*cube_cmd) return cmd_cube(ws);
    if (*query_cmd) return cmd_query(ws, query_text, format, with_report, batch_size);
    if (*repl_cmd) return cmd_repl(ws, format);
    if (*report_cmd) return cmd_report(ws, batch_size);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
