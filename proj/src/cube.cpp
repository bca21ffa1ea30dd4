#include "cubewright/cube.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "cubewright/errors.hpp"

namespace cubewright {

std::string_view to_string(DateLevel level) {
  switch (level) {
    case DateLevel::Day: return "day";
    case DateLevel::Month: return "month";
    case DateLevel::Year: return "year";
  }
  return "day";
}

std::optional<DateLevel> date_level_from_string(std::string_view text) {
  std::string t = to_upper(trim(text));
  if (t == "DAY") return DateLevel::Day;
  if (t == "MONTH") return DateLevel::Month;
  if (t == "YEAR") return DateLevel::Year;
  return std::nullopt;
}

Dimension::Dimension(std::string name, ColumnType type, DateLevel level, bool declared,
                     std::vector<std::string> members)
    : name_(std::move(name)),
      type_(type),
      level_(level),
      declared_(declared),
      members_(std::move(members)) {
  index_.reserve(members_.size());
  for (std::uint32_t i = 0; i < members_.size(); ++i) {
    index_.emplace(members_[i], i);
  }
}

std::optional<std::uint32_t> Dimension::index_of(std::string_view member) const {
  auto it = index_.find(std::string(member));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Dimension::operator==(const Dimension& other) const {
  return name_ == other.name_ && type_ == other.type_ && level_ == other.level_ &&
         declared_ == other.declared_ && members_ == other.members_;
}

namespace {

/// Grouping key of a cell value at the requested granularity.
std::string render_coord_value(const Value& value, ColumnType type, DateLevel level) {
  if (type == ColumnType::Date) {
    const Date& d = std::get<Date>(value);
    switch (level) {
      case DateLevel::Day: return d.iso();
      case DateLevel::Month: return d.iso_month();
      case DateLevel::Year: return d.iso_year();
    }
  }
  return std::get<std::string>(value);
}

int coarseness(DateLevel level) { return static_cast<int>(level); }

}  // namespace

CrossTab::Margin CrossTab::argmax(Axis axis) const {
  const auto& totals = axis == Axis::Row ? row_totals : col_totals;
  const auto& members = (axis == Axis::Row ? row_dim : col_dim).members();
  if (members.empty()) {
    throw CubeError("cannot take the top member of an empty axis");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < totals.size(); ++i) {
    if (totals[i] > totals[best]) best = i;
  }
  bool tied = false;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (i != best && totals[i] == totals[best]) {
      tied = true;
      break;
    }
  }
  return {members[best], totals[best], tied};
}

std::uint64_t Cube::total() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
}

const Dimension* Cube::find_dim(std::string_view name) const {
  std::string n = normalize_name(name);
  for (const Dimension& d : dims_) {
    if (d.name() == n) return &d;
  }
  return nullptr;
}

std::size_t Cube::dim_index(std::string_view name) const {
  std::string n = normalize_name(name);
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name() == n) return i;
  }
  throw CubeError("unknown dimension '" + n + "'");
}

std::uint64_t Cube::cell(const std::vector<std::string>& coordinate) const {
  if (coordinate.size() != dims_.size()) {
    throw CubeError("coordinate has " + std::to_string(coordinate.size()) +
                    " values, cube has " + std::to_string(dims_.size()) + " dimensions");
  }
  Coordinate coord;
  coord.reserve(coordinate.size());
  for (std::size_t i = 0; i < coordinate.size(); ++i) {
    std::string v = canonical_value(coordinate[i]);
    auto mi = dims_[i].index_of(v);
    if (!mi) {
      throw CubeError("'" + v + "' is not a member of dimension '" + dims_[i].name() + "'");
    }
    coord.push_back(*mi);
  }
  auto it = cells_.find(coord);
  return it == cells_.end() ? 0 : it->second;
}

Cube Cube::slice(std::string_view dim, std::string_view value) const {
  std::size_t di = dim_index(dim);
  std::string v = canonical_value(value);
  auto mi = dims_[di].index_of(v);
  if (!mi) {
    throw CubeError("'" + v + "' is not a member of dimension '" + dims_[di].name() + "'");
  }

  Cube out;
  out.dims_ = dims_;
  out.dims_.erase(out.dims_.begin() + static_cast<std::ptrdiff_t>(di));
  out.base_ = base_;
  out.base_columns_ = base_columns_;
  out.declared_ = declared_;
  out.restrictions_ = restrictions_;
  out.restrictions_.push_back({dims_[di].name(), dims_[di].type(), dims_[di].level(), {v}});

  for (const auto& [coord, count] : cells_) {
    if (coord[di] != *mi) continue;
    Coordinate nc;
    nc.reserve(coord.size() - 1);
    for (std::size_t i = 0; i < coord.size(); ++i) {
      if (i != di) nc.push_back(coord[i]);
    }
    out.cells_.emplace(std::move(nc), count);
  }
  return out;
}

Cube Cube::dice(const std::map<std::string, std::vector<std::string>>& keep) const {
  struct Plan {
    std::size_t di = 0;
    std::vector<std::string> new_members;
    std::vector<std::int64_t> remap;  // old index -> new index or -1
  };
  std::vector<Plan> plans;
  std::set<std::size_t> planned;
  for (const auto& [name, values] : keep) {
    Plan plan;
    plan.di = dim_index(name);
    const Dimension& d = dims_[plan.di];
    if (!planned.insert(plan.di).second) {
      throw CubeError("dimension '" + d.name() + "' named twice in dice");
    }
    if (values.empty()) {
      throw CubeError("empty member subset for dimension '" + d.name() + "'");
    }
    std::unordered_set<std::string> allowed;
    for (const std::string& raw : values) {
      std::string v = canonical_value(raw);
      if (!d.index_of(v)) {
        throw CubeError("'" + v + "' is not a member of dimension '" + d.name() + "'");
      }
      allowed.insert(std::move(v));
    }
    plan.remap.assign(d.size(), -1);
    for (std::uint32_t i = 0; i < d.size(); ++i) {
      if (allowed.count(d.members()[i])) {
        plan.remap[i] = static_cast<std::int64_t>(plan.new_members.size());
        plan.new_members.push_back(d.members()[i]);
      }
    }
    plans.push_back(std::move(plan));
  }

  Cube out;
  out.dims_ = dims_;
  out.base_ = base_;
  out.base_columns_ = base_columns_;
  out.declared_ = declared_;
  out.restrictions_ = restrictions_;
  for (const Plan& plan : plans) {
    const Dimension& d = dims_[plan.di];
    out.dims_[plan.di] = Dimension(d.name(), d.type(), d.level(), d.declared(), plan.new_members);
    out.restrictions_.push_back({d.name(), d.type(), d.level(), plan.new_members});
  }

  for (const auto& [coord, count] : cells_) {
    Coordinate nc = coord;
    bool keep_cell = true;
    for (const Plan& plan : plans) {
      std::int64_t ni = plan.remap[coord[plan.di]];
      if (ni < 0) {
        keep_cell = false;
        break;
      }
      nc[plan.di] = static_cast<std::uint32_t>(ni);
    }
    if (keep_cell) out.cells_.emplace(std::move(nc), count);
  }
  return out;
}

Cube Cube::rollup(std::string_view drop_dim) const {
  std::size_t di = dim_index(drop_dim);
  if (dims_.size() < 2) {
    throw CubeError("cannot roll up the last remaining dimension; use total()");
  }

  Cube out;
  out.dims_ = dims_;
  out.dims_.erase(out.dims_.begin() + static_cast<std::ptrdiff_t>(di));
  out.base_ = base_;
  out.base_columns_ = base_columns_;
  out.declared_ = declared_;
  out.restrictions_ = restrictions_;

  for (const auto& [coord, count] : cells_) {
    Coordinate nc;
    nc.reserve(coord.size() - 1);
    for (std::size_t i = 0; i < coord.size(); ++i) {
      if (i != di) nc.push_back(coord[i]);
    }
    out.cells_[nc] += count;
  }
  return out;
}

Cube Cube::rollup_date(DateLevel to_level) const {
  std::size_t di = dims_.size();
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].type() == ColumnType::Date) {
      di = i;
      break;
    }
  }
  if (di == dims_.size()) {
    throw CubeError("cube has no date dimension");
  }
  const Dimension& d = dims_[di];
  if (d.level() == to_level) {
    return *this;
  }
  if (coarseness(d.level()) > coarseness(to_level)) {
    throw CubeError("date dimension is already coarser than " + std::string(to_string(to_level)));
  }

  // Members are ISO-prefixed, so grouping is a prefix cut and chronological
  // order is lexicographic order.
  std::size_t prefix = to_level == DateLevel::Month ? 7 : 4;
  std::set<std::string> groups;
  for (const std::string& m : d.members()) {
    groups.insert(m.substr(0, prefix));
  }
  std::vector<std::string> new_members(groups.begin(), groups.end());
  Dimension regrouped(d.name(), ColumnType::Date, to_level, false, new_members);
  std::vector<std::uint32_t> remap(d.size());
  for (std::uint32_t i = 0; i < d.size(); ++i) {
    remap[i] = *regrouped.index_of(d.members()[i].substr(0, prefix));
  }

  Cube out;
  out.dims_ = dims_;
  out.dims_[di] = std::move(regrouped);
  out.base_ = base_;
  out.base_columns_ = base_columns_;
  out.declared_ = declared_;
  out.restrictions_ = restrictions_;
  for (const auto& [coord, count] : cells_) {
    Coordinate nc = coord;
    nc[di] = remap[coord[di]];
    out.cells_[nc] += count;
  }
  return out;
}

Cube Cube::drilldown(std::string_view dim) const {
  if (!base_) {
    throw CubeError("cube has no base table; drill-down requires one");
  }
  std::string n = normalize_name(dim);
  if (find_dim(n)) {
    throw CubeError("dimension '" + n + "' is already present");
  }
  if (std::find(base_columns_.begin(), base_columns_.end(), n) == base_columns_.end()) {
    throw CubeError("unknown dimension '" + n + "'");
  }
  std::vector<std::pair<std::string, DateLevel>> specs;
  for (const std::string& col : base_columns_) {
    if (col == n) {
      specs.emplace_back(col, DateLevel::Day);
    } else if (const Dimension* d = find_dim(col)) {
      specs.emplace_back(col, d->level());
    }
  }
  return rebuild(specs);
}

Cube Cube::drilldown_date(DateLevel to_level) const {
  if (!base_) {
    throw CubeError("cube has no base table; drill-down requires one");
  }
  std::size_t di = dims_.size();
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].type() == ColumnType::Date) {
      di = i;
      break;
    }
  }
  if (di == dims_.size()) {
    throw CubeError("cube has no date dimension");
  }
  if (coarseness(to_level) >= coarseness(dims_[di].level())) {
    throw CubeError("drill-down target is not finer than the current level");
  }
  std::vector<std::pair<std::string, DateLevel>> specs;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    specs.emplace_back(dims_[i].name(), i == di ? to_level : dims_[i].level());
  }
  return rebuild(specs);
}

CrossTab Cube::crosstab(std::string_view row_dim, std::string_view col_dim) const {
  std::size_t ri = dim_index(row_dim);
  std::size_t ci = dim_index(col_dim);
  if (ri == ci) {
    throw CubeError("crosstab dimensions must differ");
  }
  std::string rn = dims_[ri].name();
  std::string cn = dims_[ci].name();

  Cube reduced = *this;
  while (reduced.dims_.size() > 2) {
    for (const Dimension& d : reduced.dims_) {
      if (d.name() != rn && d.name() != cn) {
        reduced = reduced.rollup(d.name());
        break;
      }
    }
  }

  std::size_t rp = reduced.dim_index(rn);
  std::size_t cp = reduced.dim_index(cn);
  CrossTab ct;
  ct.row_dim = reduced.dims_[rp];
  ct.col_dim = reduced.dims_[cp];
  ct.counts.assign(ct.row_dim.size(), std::vector<std::uint64_t>(ct.col_dim.size(), 0));
  ct.row_totals.assign(ct.row_dim.size(), 0);
  ct.col_totals.assign(ct.col_dim.size(), 0);
  for (const auto& [coord, count] : reduced.cells_) {
    std::uint32_t r = coord[rp];
    std::uint32_t c = coord[cp];
    ct.counts[r][c] = count;
    ct.row_totals[r] += count;
    ct.col_totals[c] += count;
    ct.grand_total += count;
  }
  return ct;
}

Cube Cube::rebuild(const std::vector<std::pair<std::string, DateLevel>>& dim_specs) const {
  const Table& base = *base_;

  struct Source {
    std::string column;
    std::size_t col_idx = 0;
    ColumnType type = ColumnType::Categorical;
    DateLevel level = DateLevel::Day;
  };
  std::vector<Source> sources;
  sources.reserve(dim_specs.size());
  for (const auto& [column, level] : dim_specs) {
    auto idx = base.schema.index_of(column);
    if (!idx) {
      throw CubeError("unknown column '" + column + "'");
    }
    ColumnType type = base.schema.columns[*idx].type;
    if (type != ColumnType::Categorical && type != ColumnType::Date) {
      throw CubeError("column '" + column + "' is not categorical or date");
    }
    sources.push_back({column, *idx, type, type == ColumnType::Date ? level : DateLevel::Day});
  }

  Cube out;
  out.base_ = base_;
  out.base_columns_ = base_columns_;
  out.declared_ = declared_;
  out.restrictions_ = restrictions_;

  // Member lists come from the full base table (declared list, or observed
  // first-seen; coarse date levels sort chronologically), then recorded
  // restrictions at the same level narrow them.
  for (const Source& src : sources) {
    std::vector<std::string> members;
    bool declared = false;
    bool base_level = src.type == ColumnType::Categorical || src.level == DateLevel::Day;
    auto dit = declared_.find(src.column);
    if (dit != declared_.end() && base_level) {
      members = dit->second;
      declared = true;
    } else {
      std::unordered_set<std::string> seen;
      for (const Record& row : base.rows) {
        std::string v = render_coord_value(row[src.col_idx], src.type, src.level);
        if (seen.insert(v).second) members.push_back(std::move(v));
      }
      if (src.type == ColumnType::Date && src.level != DateLevel::Day) {
        std::sort(members.begin(), members.end());
      }
    }
    for (const Restriction& r : restrictions_) {
      if (r.column != src.column || r.level != src.level) continue;
      std::unordered_set<std::string> allowed(r.allowed.begin(), r.allowed.end());
      std::erase_if(members, [&](const std::string& m) { return !allowed.count(m); });
    }
    out.dims_.emplace_back(src.column, src.type, src.level, declared, std::move(members));
  }

  struct RowFilter {
    std::size_t col_idx = 0;
    ColumnType type = ColumnType::Categorical;
    DateLevel level = DateLevel::Day;
    std::unordered_set<std::string> allowed;
  };
  std::vector<RowFilter> filters;
  filters.reserve(restrictions_.size());
  for (const Restriction& r : restrictions_) {
    auto idx = base.schema.index_of(r.column);
    if (!idx) {
      throw CubeError("unknown column '" + r.column + "' in restriction log");
    }
    filters.push_back({*idx, r.type, r.level,
                       std::unordered_set<std::string>(r.allowed.begin(), r.allowed.end())});
  }

  for (const Record& row : base.rows) {
    bool pass = true;
    for (const RowFilter& f : filters) {
      if (!f.allowed.count(render_coord_value(row[f.col_idx], f.type, f.level))) {
        pass = false;
        break;
      }
    }
    if (!pass) continue;

    Coordinate coord;
    coord.reserve(sources.size());
    bool in_members = true;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      std::string v = render_coord_value(row[sources[i].col_idx], sources[i].type,
                                         sources[i].level);
      auto mi = out.dims_[i].index_of(v);
      if (!mi) {
        if (out.dims_[i].declared()) {
          throw CubeError("value '" + v + "' of column '" + sources[i].column +
                          "' is not in the declared member list");
        }
        in_members = false;
        break;
      }
      coord.push_back(*mi);
    }
    if (!in_members) continue;
    out.cells_[coord] += 1;
  }
  return out;
}

bool Cube::operator==(const Cube& other) const {
  return dims_ == other.dims_ && cells_ == other.cells_;
}

std::string Cube::to_json_text(int indent) const {
  nlohmann::json doc;
  doc["dimensions"] = nlohmann::json::array();
  for (const Dimension& d : dims_) {
    nlohmann::json jd{{"name", d.name()},
                      {"type", std::string(to_string(d.type()))},
                      {"declared", d.declared()},
                      {"members", d.members()}};
    if (d.type() == ColumnType::Date) {
      jd["level"] = std::string(to_string(d.level()));
    }
    doc["dimensions"].push_back(std::move(jd));
  }
  doc["cells"] = nlohmann::json::array();
  for (const auto& [coord, count] : cells_) {
    doc["cells"].push_back(nlohmann::json::array({coord, count}));
  }
  return indent >= 0 ? doc.dump(indent) : doc.dump();
}

Cube Cube::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cube JSON: ") + e.what());
  }

  Cube cube;
  try {
    for (const auto& jd : doc.at("dimensions")) {
      std::string name = normalize_name(jd.at("name").get<std::string>());
      auto type = column_type_from_string(jd.at("type").get<std::string>());
      if (!type || (*type != ColumnType::Categorical && *type != ColumnType::Date)) {
        throw ConfigError("invalid cube JSON: dimension type must be categorical or date");
      }
      DateLevel level = DateLevel::Day;
      if (jd.contains("level")) {
        auto parsed = date_level_from_string(jd.at("level").get<std::string>());
        if (!parsed) throw ConfigError("invalid cube JSON: bad date level");
        level = *parsed;
      }
      bool declared = jd.value("declared", false);
      std::vector<std::string> members = jd.at("members").get<std::vector<std::string>>();
      std::set<std::string> unique(members.begin(), members.end());
      if (unique.size() != members.size()) {
        throw ConfigError("invalid cube JSON: duplicate member in dimension '" + name + "'");
      }
      cube.base_columns_.push_back(name);
      if (declared) cube.declared_[name] = members;
      cube.dims_.emplace_back(std::move(name), *type, level, declared, std::move(members));
    }
    for (const auto& jc : doc.at("cells")) {
      if (!jc.is_array() || jc.size() != 2) {
        throw ConfigError("invalid cube JSON: cell entries are [coordinate, count] pairs");
      }
      Coordinate coord = jc.at(0).get<Coordinate>();
      std::uint64_t count = jc.at(1).get<std::uint64_t>();
      if (coord.size() != cube.dims_.size()) {
        throw ConfigError("invalid cube JSON: coordinate arity mismatch");
      }
      for (std::size_t i = 0; i < coord.size(); ++i) {
        if (coord[i] >= cube.dims_[i].size()) {
          throw ConfigError("invalid cube JSON: coordinate index out of range");
        }
      }
      if (count == 0) {
        throw ConfigError("invalid cube JSON: stored counts must be >= 1");
      }
      if (!cube.cells_.emplace(std::move(coord), count).second) {
        throw ConfigError("invalid cube JSON: duplicate coordinate");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cube JSON: ") + e.what());
  }
  return cube;
}

Cube build_cube(Table table, const std::vector<std::string>& dim_columns,
                const DeclaredMembers& declared) {
  if (dim_columns.empty()) {
    throw CubeError("at least one dimension column is required");
  }
  std::vector<std::string> columns;
  std::set<std::string> seen;
  for (const std::string& raw : dim_columns) {
    std::string name = normalize_name(raw);
    if (!seen.insert(name).second) {
      throw CubeError("duplicate dimension column '" + name + "'");
    }
    auto idx = table.schema.index_of(name);
    if (!idx) {
      throw CubeError("unknown column '" + name + "'");
    }
    ColumnType type = table.schema.columns[*idx].type;
    if (type != ColumnType::Categorical && type != ColumnType::Date) {
      throw CubeError("column '" + name + "' is not categorical or date");
    }
    columns.push_back(std::move(name));
  }

  DeclaredMembers canonical;
  for (const auto& [raw_name, raw_members] : declared) {
    std::string name = normalize_name(raw_name);
    if (!seen.count(name)) {
      throw CubeError("declared members given for unknown dimension '" + name + "'");
    }
    if (raw_members.empty()) {
      throw CubeError("declared member list for '" + name + "' is empty");
    }
    std::vector<std::string> members;
    std::set<std::string> unique;
    for (const std::string& m : raw_members) {
      std::string v = canonical_value(m);
      if (!unique.insert(v).second) {
        throw CubeError("duplicate declared member '" + v + "' for dimension '" + name + "'");
      }
      members.push_back(std::move(v));
    }
    canonical[name] = std::move(members);
  }

  Cube seed;
  seed.base_ = std::make_shared<const Table>(std::move(table));
  seed.base_columns_ = columns;
  seed.declared_ = std::move(canonical);
  std::vector<std::pair<std::string, DateLevel>> specs;
  specs.reserve(columns.size());
  for (const std::string& c : columns) {
    specs.emplace_back(c, DateLevel::Day);
  }
  return seed.rebuild(specs);
}

}  // namespace cubewright
