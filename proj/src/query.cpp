#include "cubewright/query.hpp"

#include <cctype>
#include <sstream>

#include "cubewright/schema.hpp"

namespace cubewright::query {

namespace {

struct Token {
  enum class Kind { Word, Quoted, Pipe, Equals, Comma, LBrace, RBrace, End };
  Kind kind = Kind::End;
  std::string text;        // unescaped for Quoted
  std::size_t pos = 0;     // character offset of the first character
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::Quoted: return "\"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

// Thrown internally and converted to the ParseError return value.
struct ParseFail {
  ParseError error;
};

[[noreturn]] void fail(std::size_t pos, std::string expected, std::string found) {
  throw ParseFail{ParseError{pos, std::move(expected), std::move(found)}};
}

bool is_punct(char c) { return c == '|' || c == '=' || c == ',' || c == '{' || c == '}'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_punct(c)) {
      Token::Kind kind = c == '|'   ? Token::Kind::Pipe
                         : c == '=' ? Token::Kind::Equals
                         : c == ',' ? Token::Kind::Comma
                         : c == '{' ? Token::Kind::LBrace
                                    : Token::Kind::RBrace;
      tokens.push_back({kind, std::string(1, c), i});
      ++i;
      continue;
    }
    if (c == '"') {
      std::size_t start = i;
      std::string value;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        char q = text[i];
        if (q == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
          value.push_back(text[i + 1]);
          i += 2;
          continue;
        }
        if (q == '"') {
          closed = true;
          ++i;
          break;
        }
        value.push_back(q);
        ++i;
      }
      if (!closed) {
        fail(start, "closing '\"'", "end of input");
      }
      tokens.push_back({Token::Kind::Quoted, std::move(value), start});
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           !is_punct(text[i]) && text[i] != '"') {
      ++i;
    }
    tokens.push_back({Token::Kind::Word, std::string(text.substr(start, i - start)), start});
  }
  tokens.push_back({Token::Kind::End, "", text.size()});
  return tokens;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  QueryAst parse() {
    QueryAst ast;
    std::vector<std::size_t> positions;
    positions.push_back(peek().pos);
    ast.stages.push_back(parse_stage());
    while (peek().kind == Token::Kind::Pipe) {
      advance();
      positions.push_back(peek().pos);
      ast.stages.push_back(parse_stage());
    }
    if (peek().kind != Token::Kind::End) {
      fail(peek().pos, "'|' or end of query", describe(peek()));
    }
    validate(ast, positions);
    return ast;
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = index_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  const Token& advance() { return tokens_[index_ < tokens_.size() - 1 ? index_++ : index_]; }

  bool word_is(const Token& t, std::string_view keyword) const {
    return t.kind == Token::Kind::Word && to_upper(t.text) == to_upper(keyword);
  }

  std::string parse_name(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word) {
      fail(t.pos, std::string(what), describe(t));
    }
    advance();
    return normalize_name(t.text);
  }

  std::string parse_value() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word && t.kind != Token::Kind::Quoted) {
      fail(t.pos, "a value", describe(t));
    }
    advance();
    return canonical_value(t.text);
  }

  void expect(Token::Kind kind, std::string_view what) {
    if (peek().kind != kind) {
      fail(peek().pos, std::string(what), describe(peek()));
    }
    advance();
  }

  DateLevel parse_level(bool allow_day) {
    const Token& t = peek();
    if (t.kind == Token::Kind::Word) {
      auto level = date_level_from_string(t.text);
      if (level && (allow_day || *level != DateLevel::Day)) {
        advance();
        return *level;
      }
    }
    fail(t.pos, allow_day ? "'day', 'month' or 'year'" : "'month' or 'year'", describe(t));
  }

  Stage parse_stage() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word) {
      fail(t.pos, "a stage keyword (slice, dice, rollup, drilldown, crosstab, top)", describe(t));
    }
    std::string kw = to_upper(t.text);
    if (kw == "SLICE") {
      advance();
      std::string dim = parse_name("a dimension name");
      expect(Token::Kind::Equals, "'='");
      return Slice{std::move(dim), parse_value()};
    }
    if (kw == "DICE") {
      advance();
      Dice dice;
      dice.dim = parse_name("a dimension name");
      if (!word_is(peek(), "in")) {
        fail(peek().pos, "'in'", describe(peek()));
      }
      advance();
      expect(Token::Kind::LBrace, "'{'");
      dice.values.push_back(parse_value());
      while (peek().kind == Token::Kind::Comma) {
        advance();
        dice.values.push_back(parse_value());
      }
      expect(Token::Kind::RBrace, "'}'");
      return dice;
    }
    if (kw == "ROLLUP") {
      advance();
      std::string name = parse_name("a dimension name or 'date'");
      if (word_is(peek(), "to")) {
        if (name != "DATE") {
          fail(peek().pos, "'|' or end of query ('rollup <dim> to' is only valid as 'rollup date to <level>')",
               describe(peek()));
        }
        advance();
        return RollupDate{parse_level(/*allow_day=*/false)};
      }
      return Rollup{std::move(name)};
    }
    if (kw == "DRILLDOWN") {
      advance();
      std::string name = parse_name("a dimension name or 'date'");
      if (word_is(peek(), "to")) {
        if (name != "DATE") {
          fail(peek().pos, "'|' or end of query ('drilldown <dim> to' is only valid as 'drilldown date to <level>')",
               describe(peek()));
        }
        advance();
        return Drilldown{parse_level(/*allow_day=*/true)};
      }
      return Drilldown{std::move(name)};
    }
    if (kw == "CROSSTAB") {
      advance();
      std::string row = parse_name("a dimension name");
      if (!word_is(peek(), "x")) {
        fail(peek().pos, "'x'", describe(peek()));
      }
      advance();
      std::string col = parse_name("a dimension name");
      return CrossTabStage{std::move(row), std::move(col)};
    }
    if (kw == "TOP") {
      advance();
      const Token& axis = peek();
      if (word_is(axis, "row")) {
        advance();
        return Top{CrossTab::Axis::Row};
      }
      if (word_is(axis, "col")) {
        advance();
        return Top{CrossTab::Axis::Col};
      }
      fail(axis.pos, "'row' or 'col'", describe(axis));
    }
    fail(t.pos, "a stage keyword (slice, dice, rollup, drilldown, crosstab, top)", describe(t));
  }

  void validate(const QueryAst& ast, const std::vector<std::size_t>& positions) {
    const std::size_t n = ast.stages.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (const auto* ct = std::get_if<CrossTabStage>(&ast.stages[i])) {
        if (ct->row_dim == ct->col_dim) {
          fail(positions[i], "two different dimensions in crosstab", "'" + ct->row_dim + "'");
        }
        bool last = i == n - 1;
        bool followed_by_final_top =
            i + 2 == n && std::holds_alternative<Top>(ast.stages[i + 1]);
        if (!last && !followed_by_final_top) {
          fail(positions[i + 1], "end of query after crosstab (only a final 'top' may follow)",
               "another stage");
        }
      }
      if (std::holds_alternative<Top>(ast.stages[i])) {
        if (i == 0 || !std::holds_alternative<CrossTabStage>(ast.stages[i - 1])) {
          fail(positions[i], "a 'crosstab' stage before 'top'", "'top'");
        }
      }
    }
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

bool needs_quoting(const std::string& value) {
  if (value.empty()) return true;
  for (char c : value) {
    bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                c == '.' || c == ':' || c == '/';
    if (!safe) return true;
  }
  return false;
}

std::string format_value(const std::string& value) {
  if (!needs_quoting(value)) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string_view stage_word(const Stage& stage) {
  return std::visit(Overloaded{[](const Slice&) { return std::string_view("slice"); },
                               [](const Dice&) { return std::string_view("dice"); },
                               [](const Rollup&) { return std::string_view("rollup"); },
                               [](const RollupDate&) { return std::string_view("rollup date"); },
                               [](const Drilldown&) { return std::string_view("drilldown"); },
                               [](const CrossTabStage&) { return std::string_view("crosstab"); },
                               [](const Top&) { return std::string_view("top"); }},
                    stage);
}

}  // namespace

ParseOutcome parse_query(std::string_view text) {
  try {
    return Parser(lex(text)).parse();
  } catch (const ParseFail& f) {
    return f.error;
  }
}

std::string print_query(const QueryAst& ast) {
  std::ostringstream out;
  bool first = true;
  for (const Stage& stage : ast.stages) {
    if (!first) out << " | ";
    first = false;
    std::visit(
        Overloaded{
            [&](const Slice& s) { out << "slice " << s.dim << "=" << format_value(s.value); },
            [&](const Dice& d) {
              out << "dice " << d.dim << " in {";
              for (std::size_t i = 0; i < d.values.size(); ++i) {
                if (i > 0) out << ", ";
                out << format_value(d.values[i]);
              }
              out << "}";
            },
            [&](const Rollup& r) { out << "rollup " << r.dim; },
            [&](const RollupDate& r) { out << "rollup date to " << to_string(r.level); },
            [&](const Drilldown& d) {
              if (const auto* level = std::get_if<DateLevel>(&d.target)) {
                out << "drilldown date to " << to_string(*level);
              } else {
                out << "drilldown " << std::get<std::string>(d.target);
              }
            },
            [&](const CrossTabStage& c) { out << "crosstab " << c.row_dim << " x " << c.col_dim; },
            [&](const Top& t) {
              out << "top " << (t.axis == CrossTab::Axis::Row ? "row" : "col");
            }},
        stage);
  }
  return out.str();
}

std::string ParseError::to_string() const {
  return "parse error at offset " + std::to_string(position) + ": expected " + expected +
         ", found " + found;
}

std::string ParseError::render(std::string_view source) const {
  // Locate the line containing the error so the caret lands correctly even
  // for multi-line input.
  std::size_t line_start = 0;
  std::size_t pos = std::min(position, source.size());
  for (std::size_t i = 0; i < pos; ++i) {
    if (source[i] == '\n') line_start = i + 1;
  }
  std::size_t line_end = source.find('\n', line_start);
  if (line_end == std::string_view::npos) line_end = source.size();

  std::string out = to_string();
  out.push_back('\n');
  out.append("  ");
  out.append(source.substr(line_start, line_end - line_start));
  out.push_back('\n');
  out.append("  ");
  out.append(pos - line_start, ' ');
  out.push_back('^');
  return out;
}

QueryExecError::QueryExecError(std::size_t stage_index, std::string_view stage_word,
                               const std::string& what)
    : Error("stage " + std::to_string(stage_index) + " (" + std::string(stage_word) +
            "): " + what),
      stage_index_(stage_index) {}

QueryResult execute(const QueryAst& ast, const Cube& cube) {
  QueryResult current = cube;
  for (std::size_t i = 0; i < ast.stages.size(); ++i) {
    const Stage& stage = ast.stages[i];
    const std::size_t stage_no = i + 1;

    auto as_cube = [&]() -> const Cube& {
      const Cube* c = std::get_if<Cube>(&current);
      if (!c) {
        throw QueryExecError(stage_no, stage_word(stage), "stage requires a cube input");
      }
      return *c;
    };
    auto as_crosstab = [&]() -> const CrossTab& {
      const CrossTab* c = std::get_if<CrossTab>(&current);
      if (!c) {
        throw QueryExecError(stage_no, stage_word(stage), "stage requires a crosstab input");
      }
      return *c;
    };

    try {
      current = std::visit(
          Overloaded{
              [&](const Slice& s) -> QueryResult { return as_cube().slice(s.dim, s.value); },
              [&](const Dice& d) -> QueryResult {
                return as_cube().dice({{d.dim, d.values}});
              },
              [&](const Rollup& r) -> QueryResult { return as_cube().rollup(r.dim); },
              [&](const RollupDate& r) -> QueryResult { return as_cube().rollup_date(r.level); },
              [&](const Drilldown& d) -> QueryResult {
                if (const auto* level = std::get_if<DateLevel>(&d.target)) {
                  return as_cube().drilldown_date(*level);
                }
                return as_cube().drilldown(std::get<std::string>(d.target));
              },
              [&](const CrossTabStage& c) -> QueryResult {
                return as_cube().crosstab(c.row_dim, c.col_dim);
              },
              [&](const Top& t) -> QueryResult { return as_crosstab().argmax(t.axis); }},
          stage);
    } catch (const QueryExecError&) {
      throw;
    } catch (const Error& e) {
      throw QueryExecError(stage_no, stage_word(stage), e.what());
    }
  }
  return current;
}

}  // namespace cubewright::query
