#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cubewright/clean.hpp"
#include "cubewright/csv.hpp"
#include "cubewright/cube.hpp"
#include "cubewright/errors.hpp"
#include "cubewright/query.hpp"
#include "cubewright/render.hpp"

namespace py = pybind11;
using namespace cubewright;

namespace {

TypeHints hints_from_dict(const std::map<std::string, std::string>& hints) {
  TypeHints out;
  for (const auto& [name, type_text] : hints) {
    auto type = column_type_from_string(type_text);
    if (!type) {
      throw std::invalid_argument("unknown column type '" + type_text + "' for '" + name + "'");
    }
    out[normalize_name(name)] = *type;
  }
  return out;
}

DateLevel level_from_text(const std::string& text) {
  auto level = date_level_from_string(text);
  if (!level) {
    throw std::invalid_argument("unknown date level '" + text + "' (day, month, year)");
  }
  return *level;
}

CrossTab::Axis axis_from_text(const std::string& text) {
  std::string t = to_upper(trim(text));
  if (t == "ROW") return CrossTab::Axis::Row;
  if (t == "COL") return CrossTab::Axis::Col;
  throw std::invalid_argument("axis must be 'row' or 'col'");
}

py::tuple margin_to_tuple(const CrossTab::Margin& m) {
  return py::make_tuple(m.member, m.count, m.tied);
}

py::object result_to_object(query::QueryResult&& result) {
  if (auto* cube = std::get_if<Cube>(&result)) {
    return py::cast(std::move(*cube));
  }
  if (auto* ct = std::get_if<CrossTab>(&result)) {
    return py::cast(std::move(*ct));
  }
  return margin_to_tuple(std::get<CrossTab::Margin>(result));
}

}  // namespace

PYBIND11_MODULE(cubewright, m) {
  m.doc() = "In-memory OLAP data cube engine: ingest, clean, cube, query.";

  py::class_<Table>(m, "Table")
      .def_property_readonly("num_rows", &Table::num_rows)
      .def_property_readonly("num_columns", &Table::num_columns)
      .def_property_readonly("column_names",
                             [](const Table& t) {
                               std::vector<std::string> names;
                               for (const Column& c : t.schema.columns) names.push_back(c.name);
                               return names;
                             })
      .def("to_csv", &to_csv_text)
      .def("__eq__", [](const Table& a, const Table& b) { return a == b; })
      .def("__repr__", [](const Table& t) {
        return "<Table " + std::to_string(t.num_rows()) + "x" + std::to_string(t.num_columns()) +
               ">";
      });

  py::class_<CrossTab>(m, "CrossTab")
      .def_property_readonly("row_dim", [](const CrossTab& ct) { return ct.row_dim.name(); })
      .def_property_readonly("col_dim", [](const CrossTab& ct) { return ct.col_dim.name(); })
      .def_property_readonly("rows", [](const CrossTab& ct) { return ct.row_dim.members(); })
      .def_property_readonly("cols", [](const CrossTab& ct) { return ct.col_dim.members(); })
      .def_readonly("counts", &CrossTab::counts)
      .def_readonly("row_totals", &CrossTab::row_totals)
      .def_readonly("col_totals", &CrossTab::col_totals)
      .def_readonly("grand_total", &CrossTab::grand_total)
      .def("argmax",
           [](const CrossTab& ct, const std::string& axis) {
             return margin_to_tuple(ct.argmax(axis_from_text(axis)));
           },
           py::arg("axis"))
      .def("to_csv", [](const CrossTab& ct) { return render_crosstab(ct, RenderFormat::Csv); })
      .def("to_pretty",
           [](const CrossTab& ct) { return render_crosstab(ct, RenderFormat::Pretty); })
      .def("__repr__", [](const CrossTab& ct) {
        return "<CrossTab " + ct.row_dim.name() + " x " + ct.col_dim.name() + ", total " +
               std::to_string(ct.grand_total) + ">";
      });

  py::class_<Cube>(m, "Cube")
      .def_property_readonly("total", &Cube::total)
      .def("dimensions",
           [](const Cube& cube) {
             std::vector<std::pair<std::string, std::vector<std::string>>> dims;
             for (const Dimension& d : cube.dims()) dims.emplace_back(d.name(), d.members());
             return dims;
           })
      .def("cells",
           [](const Cube& cube) {
             std::vector<std::pair<std::vector<std::string>, std::uint64_t>> out;
             for (const auto& [coord, count] : cube.cells()) {
               std::vector<std::string> values;
               for (std::size_t i = 0; i < coord.size(); ++i) {
                 values.push_back(cube.dims()[i].members()[coord[i]]);
               }
               out.emplace_back(std::move(values), count);
             }
             return out;
           })
      .def("cell", &Cube::cell, py::arg("coordinate"))
      .def("slice", &Cube::slice, py::arg("dim"), py::arg("value"))
      .def("dice", &Cube::dice, py::arg("keep"))
      .def("rollup", &Cube::rollup, py::arg("dim"))
      .def("rollup_date",
           [](const Cube& cube, const std::string& level) {
             return cube.rollup_date(level_from_text(level));
           },
           py::arg("level"))
      .def("drilldown", &Cube::drilldown, py::arg("dim"))
      .def("drilldown_date",
           [](const Cube& cube, const std::string& level) {
             return cube.drilldown_date(level_from_text(level));
           },
           py::arg("level"))
      .def("crosstab", &Cube::crosstab, py::arg("row_dim"), py::arg("col_dim"))
      .def("to_json", [](const Cube& cube) { return cube.to_json_text(2); })
      .def_static("from_json", &Cube::from_json_text, py::arg("text"))
      .def("__eq__", [](const Cube& a, const Cube& b) { return a == b; })
      .def("__repr__", [](const Cube& cube) {
        return "<Cube " + std::to_string(cube.dims().size()) + " dims, total " +
               std::to_string(cube.total()) + ">";
      });

  m.def(
      "load_csv",
      [](const std::string& path, const std::map<std::string, std::string>& hints) {
        return load_csv_file(path, hints_from_dict(hints));
      },
      py::arg("path"), py::arg("hints") = std::map<std::string, std::string>{});

  m.def(
      "load_csv_text",
      [](const std::string& text, const std::map<std::string, std::string>& hints) {
        std::istringstream in(text);
        return load_csv(in, hints_from_dict(hints));
      },
      py::arg("text"), py::arg("hints") = std::map<std::string, std::string>{});

  m.def(
      "clean",
      [](const Table& table, const std::vector<std::string>& keep,
         const std::map<std::string, std::map<std::string, std::string>>& synonyms,
         const std::string& on_missing) {
        CleaningSpec spec;
        for (const std::string& name : keep) spec.keep_columns.push_back(normalize_name(name));
        for (const auto& [column, mapping] : synonyms) {
          auto& table_map = spec.synonyms[normalize_name(column)];
          for (const auto& [raw, canonical] : mapping) {
            table_map[canonical_value(raw)] = canonical_value(canonical);
          }
        }
        std::string policy = to_upper(trim(on_missing));
        if (policy == "ERROR") {
          spec.on_missing = MissingPolicy::Error;
        } else if (policy == "UNKNOWN") {
          spec.on_missing = MissingPolicy::MapToUnknown;
        } else {
          throw std::invalid_argument("on_missing must be 'error' or 'unknown'");
        }
        return clean(table, spec);
      },
      py::arg("table"), py::arg("keep"),
      py::arg("synonyms") = std::map<std::string, std::map<std::string, std::string>>{},
      py::arg("on_missing") = "error");

  m.def("build_cube", &build_cube, py::arg("table"), py::arg("dimensions"),
        py::arg("declared") = DeclaredMembers{});

  m.def(
      "query",
      [](const Cube& cube, const std::string& text) {
        auto outcome = query::parse_query(text);
        if (const auto* error = std::get_if<query::ParseError>(&outcome)) {
          throw std::invalid_argument(error->to_string());
        }
        return result_to_object(query::execute(std::get<query::QueryAst>(outcome), cube));
      },
      py::arg("cube"), py::arg("text"));
}
