#include "fdeq/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "fdeq/expr.hpp"

namespace fdeq {

namespace {

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<double, bool, std::string, TomlArray> v;

  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_array() const { return std::holds_alternative<TomlArray>(v); }
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlDoc {
  std::map<std::string, TomlTable> tables;          // [name]
  std::map<std::string, std::vector<TomlTable>> arrays; // [[name]]
};

struct TomlParser {
  const std::string& s;
  size_t pos = 0;
  int line = 1;

  [[noreturn]] void error(const std::string& what) {
    fail(Errc::SyntaxError, "config line " + std::to_string(line) + ": " + what);
  }

  void skip_ws_and_comments(bool stop_at_newline) {
    while (pos < s.size()) {
      char c = s[pos];
      if (c == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
      } else if (c == '\n') {
        if (stop_at_newline) return;
        ++line;
        ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        return;
      }
    }
  }

  bool eof() {
    skip_ws_and_comments(false);
    return pos >= s.size();
  }

  std::string bare_key() {
    size_t p = pos;
    while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_')) ++p;
    if (p == pos) error("expected key");
    std::string k = s.substr(pos, p - pos);
    pos = p;
    return k;
  }

  TomlValue value() {
    skip_ws_and_comments(false);
    if (pos >= s.size()) error("expected value");
    char c = s[pos];
    if (c == '"') {
      ++pos;
      std::string out;
      while (pos < s.size() && s[pos] != '"') {
        if (s[pos] == '\\' && pos + 1 < s.size()) {
          ++pos;
          switch (s[pos]) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: out += s[pos];
          }
        } else {
          out += s[pos];
        }
        ++pos;
      }
      if (pos >= s.size()) error("unterminated string");
      ++pos;
      return TomlValue{out};
    }
    if (c == '[') {
      ++pos;
      TomlArray arr;
      while (true) {
        skip_ws_and_comments(false);
        if (pos < s.size() && s[pos] == ']') {
          ++pos;
          break;
        }
        arr.push_back(value());
        skip_ws_and_comments(false);
        if (pos < s.size() && s[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < s.size() && s[pos] == ']') {
          ++pos;
          break;
        }
        error("expected ',' or ']' in array");
      }
      return TomlValue{arr};
    }
    if (s.compare(pos, 4, "true") == 0) {
      pos += 4;
      return TomlValue{true};
    }
    if (s.compare(pos, 5, "false") == 0) {
      pos += 5;
      return TomlValue{false};
    }
    // number
    size_t p = pos;
    if (p < s.size() && (s[p] == '+' || s[p] == '-')) ++p;
    size_t start_digits = p;
    while (p < s.size() && (std::isdigit(static_cast<unsigned char>(s[p])) || s[p] == '.' || s[p] == 'e' ||
                            s[p] == 'E' || ((s[p] == '+' || s[p] == '-') && (s[p - 1] == 'e' || s[p - 1] == 'E'))))
      ++p;
    if (p == start_digits) error("unrecognized value");
    double v = 0;
    try {
      v = std::stod(s.substr(pos, p - pos));
    } catch (...) {
      error("bad number");
    }
    pos = p;
    return TomlValue{v};
  }

  TomlDoc parse() {
    TomlDoc doc;
    TomlTable* current = &doc.tables[""];
    while (!eof()) {
      if (s[pos] == '[') {
        bool array = pos + 1 < s.size() && s[pos + 1] == '[';
        pos += array ? 2 : 1;
        skip_ws_and_comments(false);
        std::string name = bare_key();
        skip_ws_and_comments(false);
        if (array) {
          if (s.compare(pos, 2, "]]") != 0) error("expected ']]'");
          pos += 2;
          doc.arrays[name].emplace_back();
          current = &doc.arrays[name].back();
        } else {
          if (pos >= s.size() || s[pos] != ']') error("expected ']'");
          ++pos;
          current = &doc.tables[name];
        }
        continue;
      }
      std::string key = bare_key();
      skip_ws_and_comments(true);
      if (pos >= s.size() || s[pos] != '=') error("expected '=' after key '" + key + "'");
      ++pos;
      if (current->contains(key)) fail(Errc::DuplicateName, "duplicate key '" + key + "'");
      current->emplace(key, value());
    }
    return doc;
  }
};

double need_number(const TomlTable& t, const std::string& key, const std::string& ctx) {
  auto it = t.find(key);
  if (it == t.end()) fail(Errc::MissingSection, ctx + " is missing key '" + key + "'");
  if (!it->second.is_number()) fail(Errc::BadArgument, ctx + " key '" + key + "' must be a number");
  return std::get<double>(it->second.v);
}

std::string need_string(const TomlTable& t, const std::string& key, const std::string& ctx) {
  auto it = t.find(key);
  if (it == t.end()) fail(Errc::MissingSection, ctx + " is missing key '" + key + "'");
  if (!it->second.is_string()) fail(Errc::BadArgument, ctx + " key '" + key + "' must be a string");
  return std::get<std::string>(it->second.v);
}

int need_int(const TomlTable& t, const std::string& key, const std::string& ctx) {
  double v = need_number(t, key, ctx);
  int i = int(v);
  if (double(i) != v) fail(Errc::BadArgument, ctx + " key '" + key + "' must be an integer");
  return i;
}

std::string dirname_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  return path.substr(0, slash);
}

} // namespace

cpx parse_complex_entry(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) fail(Errc::BadArgument, "empty matrix entry");

  auto read_num = [&](size_t& p) -> double {
    size_t start = p;
    if (p < t.size() && (t[p] == '+' || t[p] == '-')) ++p;
    while (p < t.size() && (std::isdigit(static_cast<unsigned char>(t[p])) || t[p] == '.')) ++p;
    if (p < t.size() && (t[p] == 'e' || t[p] == 'E')) {
      ++p;
      if (p < t.size() && (t[p] == '+' || t[p] == '-')) ++p;
      while (p < t.size() && std::isdigit(static_cast<unsigned char>(t[p]))) ++p;
    }
    if (p == start || (p == start + 1 && !std::isdigit(static_cast<unsigned char>(t[start]))))
      fail(Errc::BadArgument, "bad matrix entry '" + text + "'");
    return std::stod(t.substr(start, p - start));
  };

  size_t p = 0;
  // pure imaginary forms: "2j", "-1.5j", "j", "-j"
  if (t.back() == 'j' || t.back() == 'i') {
    // try to split into re +/- im j
    double first = read_num(p);
    if (p == t.size() - 1) return cpx(0.0, first);
    double second = read_num(p);
    if (p != t.size() - 1) fail(Errc::BadArgument, "bad matrix entry '" + text + "'");
    return cpx(first, second);
  }
  double re = read_num(p);
  if (p != t.size()) fail(Errc::BadArgument, "bad matrix entry '" + text + "'");
  return cpx(re, 0.0);
}

std::string format_complex_entry(cpx v) {
  char buf[80];
  if (v.imag() == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g", v.real());
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", v.real(), v.imag());
  return buf;
}

CMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open matrix file '" + path + "'");
  std::vector<std::vector<cpx>> rows;
  std::string linebuf;
  while (std::getline(in, linebuf)) {
    if (linebuf.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<cpx> row;
    std::stringstream ss(linebuf);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_complex_entry(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Errc::BadMatrixShape, "matrix file '" + path + "' is empty");
  CMatrix m(int(rows.size()), int(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      fail(Errc::BadMatrixShape, "ragged rows in matrix file '" + path + "'");
    for (size_t j = 0; j < rows[i].size(); ++j) m(int(i), int(j)) = rows[i][j];
  }
  return m;
}

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec g;
  auto c1 = text.find(':');
  auto c2 = text.rfind(':');
  if (c1 == std::string::npos || c2 == c1) fail(Errc::BadArgument, "grid must be 'a:b:n'");
  try {
    g.lo = std::stod(text.substr(0, c1));
    g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    g.points = std::stoi(text.substr(c2 + 1));
  } catch (...) {
    fail(Errc::BadArgument, "grid must be 'a:b:n'");
  }
  if (g.points < 2 || g.hi <= g.lo) fail(Errc::BadArgument, "grid needs hi > lo and n >= 2");
  return g;
}

namespace {

CMatrix matrix_from_inline(const TomlArray& data, const std::string& name) {
  if (data.empty()) fail(Errc::BadMatrixShape, "matrix '" + name + "' has empty data");
  std::vector<std::vector<cpx>> rows;
  for (const auto& rowv : data) {
    if (!rowv.is_array()) fail(Errc::BadMatrixShape, "matrix '" + name + "' data must be rows of entries");
    std::vector<cpx> row;
    for (const auto& cell : std::get<TomlArray>(rowv.v)) {
      if (cell.is_number())
        row.push_back(cpx(std::get<double>(cell.v), 0.0));
      else if (cell.is_string())
        row.push_back(parse_complex_entry(std::get<std::string>(cell.v)));
      else
        fail(Errc::BadMatrixShape, "matrix '" + name + "' entries must be numbers or strings");
    }
    rows.push_back(std::move(row));
  }
  CMatrix m(int(rows.size()), int(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      fail(Errc::BadMatrixShape, "matrix '" + name + "' has ragged rows");
    for (size_t j = 0; j < rows[i].size(); ++j) m(int(i), int(j)) = rows[i][j];
  }
  return m;
}

} // namespace

ParsedConfig parse_config(const std::string& text, const std::string& base_dir) {
  TomlParser tp{text};
  TomlDoc doc = tp.parse();

  ParsedConfig out;

  auto space_it = doc.tables.find("space");
  if (space_it == doc.tables.end()) fail(Errc::MissingSection, "missing [space] section");
  const TomlTable& space = space_it->second;
  auto blocks_it = space.find("blocks");
  if (blocks_it == space.end() || !blocks_it->second.is_array())
    fail(Errc::MissingSection, "[space] needs blocks = [n0, n1, ...]");
  std::vector<int> dims;
  for (const auto& v : std::get<TomlArray>(blocks_it->second.v)) {
    if (!v.is_number()) fail(Errc::BadArgument, "[space] blocks must be integers");
    dims.push_back(int(std::get<double>(v.v)));
  }
  out.spec.space = make_rect_space(dims);
  if (space.contains("target_block")) out.spec.target_block = need_int(space, "target_block", "[space]");

  const int nblocks = out.spec.space.block_count();
  auto check_block = [&](int b, const std::string& ctx) {
    if (b < 0 || b >= nblocks) fail(Errc::BadArgument, ctx + ": block index " + std::to_string(b) + " out of range");
  };

  auto add_symbol = [&](Symbol sym) {
    if (out.spec.symbols.contains(sym.name)) fail(Errc::DuplicateName, "symbol '" + sym.name + "' defined twice");
    out.spec.symbols.emplace(sym.name, std::move(sym));
  };

  if (auto it = doc.arrays.find("matrix"); it != doc.arrays.end()) {
    for (const auto& t : it->second) {
      Symbol sym;
      sym.kind = SymbolKind::Deterministic;
      sym.name = need_string(t, "name", "[[matrix]]");
      sym.row_block = need_int(t, "row_block", "[[matrix]] " + sym.name);
      sym.col_block = need_int(t, "col_block", "[[matrix]] " + sym.name);
      check_block(sym.row_block, sym.name);
      check_block(sym.col_block, sym.name);
      if (t.contains("data")) {
        const auto& dv = t.at("data");
        if (!dv.is_array()) fail(Errc::BadMatrixShape, "matrix '" + sym.name + "' data must be an array");
        sym.matrix = matrix_from_inline(std::get<TomlArray>(dv.v), sym.name);
      } else if (t.contains("csv")) {
        std::string p = need_string(t, "csv", "[[matrix]] " + sym.name);
        if (!p.empty() && p.front() != '/') p = base_dir + "/" + p;
        sym.matrix = load_matrix_csv(p);
      } else {
        fail(Errc::MissingSection, "matrix '" + sym.name + "' needs data = [...] or csv = \"path\"");
      }
      const int nr = out.spec.space.block_dims[sym.row_block];
      const int nc = out.spec.space.block_dims[sym.col_block];
      if (sym.matrix.rows() != nr || sym.matrix.cols() != nc)
        fail(Errc::BadMatrixShape, "matrix '" + sym.name + "' is " + std::to_string(sym.matrix.rows()) + "x" +
                                       std::to_string(sym.matrix.cols()) + " but blocks require " +
                                       std::to_string(nr) + "x" + std::to_string(nc));
      add_symbol(std::move(sym));
    }
  }

  if (auto it = doc.arrays.find("element"); it != doc.arrays.end()) {
    for (const auto& t : it->second) {
      Symbol sym;
      sym.name = need_string(t, "name", "[[element]]");
      std::string kind = need_string(t, "kind", "[[element]] " + sym.name);
      if (kind == "circular")
        sym.kind = SymbolKind::Circular;
      else if (kind == "semicircular")
        sym.kind = SymbolKind::Semicircular;
      else if (kind == "haar")
        sym.kind = SymbolKind::HaarUnitary;
      else
        fail(Errc::BadArgument, "element '" + sym.name + "' kind must be circular|semicircular|haar");
      sym.row_block = sym.col_block = need_int(t, "block", "[[element]] " + sym.name);
      check_block(sym.row_block, sym.name);
      add_symbol(std::move(sym));
    }
  }

  auto poly_it = doc.tables.find("polynomial");
  if (poly_it == doc.tables.end()) fail(Errc::MissingSection, "missing [polynomial] section");
  out.polynomial_text = need_string(poly_it->second, "expr", "[polynomial]");
  out.spec.polynomial = to_polynomial(parse_polynomial(out.polynomial_text));

  if (auto it = doc.tables.find("solve"); it != doc.tables.end()) {
    const TomlTable& t = it->second;
    if (t.contains("grid")) out.solve.grid = parse_grid_spec(need_string(t, "grid", "[solve]"));
    if (t.contains("epsilon")) out.solve.epsilon = need_number(t, "epsilon", "[solve]");
    if (t.contains("tolerance")) out.solve.tolerance = need_number(t, "tolerance", "[solve]");
    if (t.contains("max_iter")) out.solve.max_iter = need_int(t, "max_iter", "[solve]");
    if (t.contains("damping")) out.solve.damping = need_number(t, "damping", "[solve]");
    if (t.contains("quad_nodes")) out.solve.quad_nodes = need_int(t, "quad_nodes", "[solve]");
    if (t.contains("midpoint_quadrature"))
      out.solve.midpoint_quadrature = std::get<bool>(t.at("midpoint_quadrature").v);
    if (t.contains("richardson_epsilon"))
      out.solve.richardson_epsilon = need_number(t, "richardson_epsilon", "[solve]");
  }

  if (auto it = doc.tables.find("mc"); it != doc.tables.end()) {
    const TomlTable& t = it->second;
    if (t.contains("m")) out.mc.m = need_int(t, "m", "[mc]");
    if (t.contains("reps")) out.mc.reps = need_int(t, "reps", "[mc]");
    if (t.contains("seed")) out.mc.seed = std::uint64_t(need_number(t, "seed", "[mc]"));
    if (t.contains("bins")) out.mc.bins = need_int(t, "bins", "[mc]");
  }

  out.spec = validate(std::move(out.spec));
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), dirname_of(path));
}

} // namespace fdeq
