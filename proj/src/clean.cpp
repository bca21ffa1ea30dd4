#include "cubewright/clean.hpp"

#include <json.hpp>

#include "cubewright/errors.hpp"

namespace cubewright {

CleaningSpec CleaningSpec::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cleaning spec JSON: ") + e.what());
  }

  CleaningSpec spec;
  try {
    if (!doc.contains("keep")) {
      throw ConfigError("cleaning spec: missing 'keep'");
    }
    for (const auto& name : doc.at("keep")) {
      spec.keep_columns.push_back(normalize_name(name.get<std::string>()));
    }
    if (doc.contains("synonyms")) {
      for (const auto& [column, mapping] : doc.at("synonyms").items()) {
        auto& table = spec.synonyms[normalize_name(column)];
        for (const auto& [raw, canonical] : mapping.items()) {
          table[canonical_value(raw)] = canonical_value(canonical.get<std::string>());
        }
      }
    }
    if (doc.contains("on_missing")) {
      std::string policy = to_upper(doc.at("on_missing").get<std::string>());
      if (policy == "ERROR") {
        spec.on_missing = MissingPolicy::Error;
      } else if (policy == "UNKNOWN" || policy == "MAP_TO_UNKNOWN") {
        spec.on_missing = MissingPolicy::MapToUnknown;
      } else {
        throw ConfigError("cleaning spec: on_missing must be 'error' or 'unknown'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cleaning spec JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

void CleaningSpec::validate() const {
  if (keep_columns.empty()) {
    throw ConfigError("cleaning spec: 'keep' must name at least one column");
  }
  for (const auto& [column, mapping] : synonyms) {
    for (const auto& [raw, canonical] : mapping) {
      auto it = mapping.find(canonical);
      if (it != mapping.end() && it->second != canonical) {
        throw ConfigError("cleaning spec: synonym chain in column '" + column + "': '" + raw +
                          "' -> '" + canonical + "' -> '" + it->second + "'");
      }
    }
  }
}

Schema cleaned_schema(const Schema& input, const CleaningSpec& spec) {
  Schema out;
  for (const std::string& name : spec.keep_columns) {
    auto idx = input.index_of(name);
    if (!idx) {
      throw CleanError("unknown column '" + normalize_name(name) + "' in keep list");
    }
    out.columns.push_back(input.columns[*idx]);
  }
  return out;
}

Table clean(const Table& table, const CleaningSpec& spec) {
  spec.validate();
  Schema out_schema = cleaned_schema(table.schema, spec);

  std::vector<std::size_t> source_index;
  std::vector<const std::map<std::string, std::string>*> column_synonyms;
  source_index.reserve(out_schema.columns.size());
  for (const Column& column : out_schema.columns) {
    source_index.push_back(*table.schema.index_of(column.name));
    auto it = spec.synonyms.find(column.name);
    column_synonyms.push_back(it == spec.synonyms.end() ? nullptr : &it->second);
  }

  Table out{std::move(out_schema), {}};
  out.rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Record record;
    record.reserve(source_index.size());
    for (std::size_t c = 0; c < source_index.size(); ++c) {
      Value value = table.rows[r][source_index[c]];
      ColumnType type = out.schema.columns[c].type;
      if (type == ColumnType::Categorical || type == ColumnType::Text) {
        std::string& text = std::get<std::string>(value);
        if (text.empty()) {
          if (spec.on_missing == MissingPolicy::Error) {
            throw CleanError("row " + std::to_string(r) + ", column '" +
                             out.schema.columns[c].name + "': empty cell");
          }
          text = "UNKNOWN";
        } else if (type == ColumnType::Categorical && column_synonyms[c]) {
          auto hit = column_synonyms[c]->find(text);
          if (hit != column_synonyms[c]->end()) text = hit->second;
        }
      }
      record.push_back(std::move(value));
    }
    out.rows.push_back(std::move(record));
  }
  return out;
}

std::vector<Violation> validate_domains(
    const Table& table, const std::map<std::string, std::set<std::string>>& domains) {
  std::vector<std::pair<std::size_t, const std::set<std::string>*>> checks;
  for (const auto& [name, members] : domains) {
    auto idx = table.schema.index_of(name);
    if (!idx) {
      throw CleanError("unknown domain column '" + normalize_name(name) + "'");
    }
    checks.emplace_back(*idx, &members);
  }

  std::vector<Violation> violations;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (const auto& [c, members] : checks) {
      std::string text = to_display(table.rows[r][c]);
      if (!members->count(text)) {
        violations.push_back({r, table.schema.columns[c].name, text});
      }
    }
  }
  return violations;
}

}  // namespace cubewright
