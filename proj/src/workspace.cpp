#include "cubewright/workspace.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cubewright/errors.hpp"

namespace cubewright {

Workspace Workspace::load(const std::filesystem::path& dir) {
  std::filesystem::path config_path = dir / "workspace.json";
  std::ifstream in(config_path);
  if (!in) {
    throw ConfigError("workspace config '" + config_path.string() + "' not found");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid workspace config '" + config_path.string() + "': " + e.what());
  }

  Workspace ws;
  ws.dir = dir;
  try {
    if (doc.contains("schema")) {
      for (const auto& [name, type_text] : doc.at("schema").items()) {
        auto type = column_type_from_string(type_text.get<std::string>());
        if (!type) {
          throw ConfigError("workspace config: unknown column type '" +
                            type_text.get<std::string>() + "' for '" + name + "'");
        }
        ws.hints[normalize_name(name)] = *type;
      }
    }
    if (!doc.contains("cleaning")) {
      throw ConfigError("workspace config: missing 'cleaning'");
    }
    ws.cleaning = CleaningSpec::from_json_text(doc.at("cleaning").dump());
    if (!doc.contains("dimensions")) {
      throw ConfigError("workspace config: missing 'dimensions'");
    }
    for (const auto& name : doc.at("dimensions")) {
      ws.cube.dimensions.push_back(normalize_name(name.get<std::string>()));
    }
    if (doc.contains("declared_members")) {
      for (const auto& [name, members] : doc.at("declared_members").items()) {
        std::vector<std::string> list;
        for (const auto& m : members) {
          list.push_back(canonical_value(m.get<std::string>()));
        }
        ws.cube.declared[normalize_name(name)] = std::move(list);
      }
    }
    auto file_of = [&](const char* key, const char* fallback) {
      if (doc.contains("files") && doc.at("files").contains(key)) {
        return dir / doc.at("files").at(key).get<std::string>();
      }
      return dir / fallback;
    };
    ws.raw_path = file_of("raw", "raw.csv");
    ws.clean_path = file_of("clean", "clean.csv");
    ws.cube_path = file_of("cube", "cube.json");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid workspace config '" + config_path.string() + "': " + e.what());
  }
  if (ws.cube.dimensions.empty()) {
    throw ConfigError("workspace config: 'dimensions' must name at least one column");
  }
  return ws;
}

}  // namespace cubewright
