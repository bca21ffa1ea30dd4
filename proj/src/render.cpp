#include "cubewright/render.hpp"

#include <sstream>

#include <json.hpp>

namespace cubewright {

namespace {

constexpr std::string_view kMeasure = "COUNT";
constexpr std::string_view kTotal = "TOTAL";

/// Space-padded grid: first column left-aligned, all others right-aligned,
/// two spaces between columns.
std::string layout_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& cell = row[c];
      if (c == 0) {
        out << cell;
        if (row.size() > 1) out << std::string(widths[0] - cell.size(), ' ');
      } else {
        out << "  " << std::string(widths[c] - cell.size(), ' ') << cell;
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<std::string>> crosstab_grid(const CrossTab& ct) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  header.emplace_back(kMeasure);
  for (const std::string& m : ct.col_dim.members()) header.push_back(m);
  header.emplace_back(kTotal);
  rows.push_back(std::move(header));

  for (std::size_t r = 0; r < ct.row_dim.members().size(); ++r) {
    std::vector<std::string> row;
    row.push_back(ct.row_dim.members()[r]);
    for (std::uint64_t v : ct.counts[r]) row.push_back(std::to_string(v));
    row.push_back(std::to_string(ct.row_totals[r]));
    rows.push_back(std::move(row));
  }

  std::vector<std::string> totals;
  totals.emplace_back(kTotal);
  for (std::uint64_t v : ct.col_totals) totals.push_back(std::to_string(v));
  totals.push_back(std::to_string(ct.grand_total));
  rows.push_back(std::move(totals));
  return rows;
}

std::string grid_to_csv(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << row[c];
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<std::string>> cube_grid(const Cube& cube) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  for (const Dimension& d : cube.dims()) header.push_back(d.name());
  header.emplace_back(kMeasure);
  rows.push_back(std::move(header));
  for (const auto& [coord, count] : cube.cells()) {
    std::vector<std::string> row;
    for (std::size_t i = 0; i < coord.size(); ++i) {
      row.push_back(cube.dims()[i].members()[coord[i]]);
    }
    row.push_back(std::to_string(count));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::optional<RenderFormat> render_format_from_string(std::string_view text) {
  std::string t = to_upper(trim(text));
  if (t == "PRETTY") return RenderFormat::Pretty;
  if (t == "CSV") return RenderFormat::Csv;
  if (t == "JSON") return RenderFormat::Json;
  return std::nullopt;
}

std::string render_cube(const Cube& cube, RenderFormat format) {
  switch (format) {
    case RenderFormat::Pretty: return layout_grid(cube_grid(cube));
    case RenderFormat::Csv: return grid_to_csv(cube_grid(cube));
    case RenderFormat::Json: return cube.to_json_text(2) + "\n";
  }
  return {};
}

std::string render_crosstab(const CrossTab& ct, RenderFormat format) {
  switch (format) {
    case RenderFormat::Pretty: return layout_grid(crosstab_grid(ct));
    case RenderFormat::Csv: return grid_to_csv(crosstab_grid(ct));
    case RenderFormat::Json: {
      nlohmann::json doc{{"row_dim", ct.row_dim.name()},
                         {"col_dim", ct.col_dim.name()},
                         {"rows", ct.row_dim.members()},
                         {"cols", ct.col_dim.members()},
                         {"counts", ct.counts},
                         {"row_totals", ct.row_totals},
                         {"col_totals", ct.col_totals},
                         {"grand_total", ct.grand_total}};
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

std::string render_margin(const CrossTab::Margin& m, RenderFormat format) {
  switch (format) {
    case RenderFormat::Pretty:
      return m.member + " (" + std::to_string(m.count) + ")" + (m.tied ? " [tie]" : "") + "\n";
    case RenderFormat::Csv:
      return m.member + "," + std::to_string(m.count) + "\n";
    case RenderFormat::Json: {
      nlohmann::json doc{{"member", m.member}, {"count", m.count}, {"tied", m.tied}};
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

std::string render_result(const query::QueryResult& result, RenderFormat format) {
  if (const auto* cube = std::get_if<Cube>(&result)) {
    return render_cube(*cube, format);
  }
  if (const auto* ct = std::get_if<CrossTab>(&result)) {
    return render_crosstab(*ct, format);
  }
  return render_margin(std::get<CrossTab::Margin>(result), format);
}

}  // namespace cubewright
