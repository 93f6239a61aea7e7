#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace grail {

struct GrailError : std::runtime_error {
  explicit GrailError(const std::string& m) : std::runtime_error(m) {}
};

struct Sexp {
  bool is_atom = false;
  std::string text;         // atom payload
  std::vector<Sexp> items;  // list payload
  std::size_t line = 0;

  static Sexp atom(std::string t) {
    Sexp s;
    s.is_atom = true;
    s.text = std::move(t);
    return s;
  }
  static Sexp list(std::vector<Sexp> xs) {
    Sexp s;
    s.items = std::move(xs);
    return s;
  }

  bool is_list() const { return !is_atom; }
  std::size_t size() const { return items.size(); }
  const Sexp& at(std::size_t i) const {
    if (is_atom || i >= items.size())
      throw GrailError("sexpr: missing element " + std::to_string(i) + where());
    return items[i];
  }
  const std::string& atom_text() const {
    if (!is_atom) throw GrailError("sexpr: expected atom" + where());
    return text;
  }
  const std::string& head() const {
    if (is_atom || items.empty() || !items[0].is_atom)
      throw GrailError("sexpr: expected a headed list" + where());
    return items[0].text;
  }
  bool headed(const std::string& h) const {
    return !is_atom && !items.empty() && items[0].is_atom && items[0].text == h;
  }
  std::string where() const { return line ? " (line " + std::to_string(line) + ")" : ""; }

  std::string str() const {
    if (is_atom) return text;
    std::string out = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ' ';
      out += items[i].str();
    }
    out += ')';
    return out;
  }
};

namespace detail {
inline void skip_ws(const std::string& s, std::size_t& i, std::size_t& line) {
  while (i < s.size()) {
    if (s[i] == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else if (s[i] == ';') {  // comment to end of line
      while (i < s.size() && s[i] != '\n') ++i;
    } else {
      break;
    }
  }
}

inline Sexp parse_one(const std::string& s, std::size_t& i, std::size_t& line) {
  skip_ws(s, i, line);
  if (i >= s.size()) throw GrailError("sexpr: unexpected end of input");
  if (s[i] == ')') throw GrailError("sexpr: unexpected ')' at line " + std::to_string(line));
  if (s[i] == '(') {
    std::size_t start_line = line;
    ++i;
    Sexp out;
    out.line = start_line;
    while (true) {
      skip_ws(s, i, line);
      if (i >= s.size())
        throw GrailError("sexpr: unclosed '(' opened at line " + std::to_string(start_line));
      if (s[i] == ')') {
        ++i;
        return out;
      }
      out.items.push_back(parse_one(s, i, line));
    }
  }
  std::size_t start = i, start_line = line;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
         s[i] != ')' && s[i] != ';')
    ++i;
  Sexp a = Sexp::atom(s.substr(start, i - start));
  a.line = start_line;
  return a;
}
}  // namespace detail

inline std::vector<Sexp> parse_sexprs(const std::string& s) {
  std::vector<Sexp> out;
  std::size_t i = 0, line = 1;
  while (true) {
    detail::skip_ws(s, i, line);
    if (i >= s.size()) break;
    out.push_back(detail::parse_one(s, i, line));
  }
  return out;
}

inline Sexp parse_single_sexp(const std::string& s) {
  auto v = parse_sexprs(s);
  if (v.size() != 1) throw GrailError("expected exactly one s-expression");
  return v[0];
}

}  // namespace grail
