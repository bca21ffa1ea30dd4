#pragma once

#include <string>

#include "cubewright/cube.hpp"
#include "cubewright/query.hpp"

namespace cubewright {

enum class RenderFormat { Pretty, Csv, Json };

std::optional<RenderFormat> render_format_from_string(std::string_view text);

// Pretty renders left-align member names and right-align counts; the corner
// cell carries the measure name (COUNT). CrossTab renders include the TOTAL
// row and TOTAL column in Pretty and Csv forms.

std::string render_cube(const Cube& cube, RenderFormat format);
std::string render_crosstab(const CrossTab& ct, RenderFormat format);
std::string render_margin(const CrossTab::Margin& m, RenderFormat format);
std::string render_result(const query::QueryResult& result, RenderFormat format);

}  // namespace cubewright
