#include "fmmkit/io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace fmmkit {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Non-blank lines with comments removed.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string t = trim(raw);
    if (!t.empty()) out.push_back({number, std::move(t)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::size_t parse_count(const std::string& word, const Line& line) {
  if (word.empty() || word.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("expected a non-negative integer, got '" + word + "'", line.number);
  return std::stoul(word);
}

// Matrix row: comma-separated scalars, or whitespace-separated when no comma is present.
std::vector<LaurentScalar> parse_row(const Line& line, std::size_t expected) {
  std::vector<std::string> cells;
  if (line.text.find(',') != std::string::npos) {
    std::size_t pos = 0;
    for (;;) {
      const auto c = line.text.find(',', pos);
      cells.push_back(trim(std::string_view(line.text).substr(pos, c == std::string::npos ? std::string::npos : c - pos)));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
  } else {
    // Words joined by '+' belong to one scalar.
    for (auto& w : split_words(line.text)) {
      const bool joins = !cells.empty() && (cells.back().back() == '+' || w.front() == '+');
      if (joins)
        cells.back() += " " + w;
      else
        cells.push_back(std::move(w));
    }
  }
  if (cells.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " entries, found " + std::to_string(cells.size()),
                     line.number);
  std::vector<LaurentScalar> out;
  out.reserve(expected);
  for (const auto& cell : cells) {
    try {
      out.push_back(LaurentScalar::parse(cell));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line.number);
    }
  }
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}
  bool done() const { return pos_ == lines_.size(); }
  const Line& peek() const { return lines_.at(pos_); }
  const Line& next(const char* expecting) {
    if (done()) throw ParseError(std::string("unexpected end of file, expected ") + expecting, last_number());
    return lines_[pos_++];
  }
  std::size_t last_number() const { return lines_.empty() ? 0 : lines_.back().number; }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

std::vector<std::string> keyword_line(Cursor& cur, const std::string& keyword, std::size_t args, Line& where) {
  where = cur.next(keyword.c_str());
  auto words = split_words(where.text);
  if (words.empty() || words[0] != keyword || words.size() != args + 1)
    throw ParseError("expected '" + keyword + "' line with " + std::to_string(args) + " argument(s)", where.number);
  return {words.begin() + 1, words.end()};
}

LaurentMatrix read_matrix(Cursor& cur, std::size_t rows, std::size_t cols) {
  std::vector<LaurentScalar> data;
  data.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = parse_row(cur.next("matrix row"), cols);
    for (auto& v : row) data.push_back(std::move(v));
  }
  return {rows, cols, std::move(data)};
}

}  // namespace

FmmTensor parse_tensor(std::string_view text) {
  Cursor cur(content_lines(text));
  Line where;
  auto header = keyword_line(cur, "fmm", 1, where);
  if (header[0] != "1") throw ParseError("unsupported format version '" + header[0] + "'", where.number);

  auto dim_words = keyword_line(cur, "dims", 3, where);
  const Dims dims{parse_count(dim_words[0], where), parse_count(dim_words[1], where), parse_count(dim_words[2], where)};
  if (dims.m == 0 || dims.n == 0 || dims.p == 0) throw ParseError("dimensions must be positive", where.number);

  auto rank_words = keyword_line(cur, "rank", 1, where);
  const std::size_t rank = parse_count(rank_words[0], where);
  const std::size_t rank_line = where.number;

  auto field = keyword_line(cur, "field", 1, where);
  FieldMode mode;
  if (field[0] == "rational")
    mode = FieldMode::rational;
  else if (field[0] == "laurent")
    mode = FieldMode::laurent;
  else
    throw ParseError("unknown field '" + field[0] + "'", where.number);

  std::optional<SupportMask> support;
  if (!cur.done() && cur.peek().text == "support") {
    cur.next("support");
    std::vector<bool> allowed;
    for (std::size_t i = 0; i < dims.m; ++i) {
      const Line& row = cur.next("support row");
      if (row.text.size() != dims.n || row.text.find_first_not_of("01") != std::string::npos)
        throw ParseError("support row must be " + std::to_string(dims.n) + " characters from {0,1}", row.number);
      for (char c : row.text) allowed.push_back(c == '1');
    }
    try {
      support.emplace(dims.m, dims.n, std::move(allowed));
    } catch (const Error& e) {
      throw ParseError(e.what(), where.number);
    }
  }

  std::vector<RankOneTerm> terms;
  while (!cur.done()) {
    const Line& head = cur.next("term");
    const auto words = split_words(head.text);
    if (words.size() != 2 || words[0] != "term") throw ParseError("expected 'term <index>'", head.number);
    if (parse_count(words[1], head) != terms.size() + 1)
      throw ParseError("term index " + words[1] + " out of sequence, expected " + std::to_string(terms.size() + 1),
                       head.number);
    RankOneTerm term;
    term.P = read_matrix(cur, dims.m, dims.n);
    term.Q = read_matrix(cur, dims.n, dims.p);
    term.S = read_matrix(cur, dims.p, dims.m);
    if (mode == FieldMode::rational && (!is_rational(term.P) || !is_rational(term.Q) || !is_rational(term.S)))
      throw ParseError("e term in rational-mode tensor (term " + words[1] + ")", head.number);
    terms.push_back(std::move(term));
  }
  if (terms.size() != rank)
    throw ParseError("rank mismatch: header declares " + std::to_string(rank) + " terms, file has " +
                         std::to_string(terms.size()),
                     rank_line);
  try {
    return FmmTensor(dims, mode, std::move(terms), std::move(support));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

std::string write_tensor(const FmmTensor& t) {
  std::ostringstream os;
  const Dims& d = t.dims();
  os << "fmm 1\n"
     << "dims " << d.m << ' ' << d.n << ' ' << d.p << '\n'
     << "rank " << t.rank() << '\n'
     << "field " << to_string(t.field_mode()) << '\n';
  if (const auto& s = t.support()) {
    os << "support\n";
    for (std::size_t i = 0; i < s->rows(); ++i) {
      for (std::size_t j = 0; j < s->cols(); ++j) os << (s->allowed(i, j) ? '1' : '0');
      os << '\n';
    }
  }
  for (std::size_t i = 0; i < t.rank(); ++i) {
    const auto& term = t.term(i);
    os << "\nterm " << (i + 1) << '\n' << to_string(term.P) << '\n' << to_string(term.Q) << '\n' << to_string(term.S);
  }
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

FmmTensor load_tensor(const std::filesystem::path& path) {
  try {
    return parse_tensor(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_tensor(const std::filesystem::path& path, const FmmTensor& t) { write_file(path, write_tensor(t)); }

RationalMatrix parse_matrix(std::string_view text) {
  const auto lines = content_lines(text);
  std::vector<std::pair<std::size_t, std::string>> tokens;
  for (const auto& l : lines)
    for (auto& w : split_words(l.text)) tokens.emplace_back(l.number, std::move(w));
  if (tokens.size() < 2) throw ParseError("matrix file needs a 'rows cols' header");
  const Line h{tokens[0].first, tokens[0].second};
  const std::size_t rows = parse_count(tokens[0].second, h);
  const std::size_t cols = parse_count(tokens[1].second, h);
  if (tokens.size() != 2 + rows * cols)
    throw ParseError("matrix declares " + std::to_string(rows * cols) + " entries, found " +
                     std::to_string(tokens.size() - 2));
  std::vector<Rational> data;
  data.reserve(rows * cols);
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    try {
      data.push_back(Rational::parse(tokens[i].second));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), tokens[i].first);
    }
  }
  return {rows, cols, std::move(data)};
}

std::string write_matrix(const RationalMatrix& m) {
  std::ostringstream os;
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j).to_string();
    os << '\n';
  }
  return os.str();
}

RationalMatrix load_matrix(const std::filesystem::path& path) {
  try {
    return parse_matrix(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const RationalMatrix& m) { write_file(path, write_matrix(m)); }

}  // namespace fmmkit
