#include "cslw/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cslw {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// ---------------------------------------------------------------- DCP ----

struct Token {
  enum Kind { Ident, Number, Tilde, LParen, RParen, LBracket, RBracket,
              Comma, Colon, Implies, CmpEq, CmpLt, CmpLe, CmpGt, CmpGe, End };
  Kind kind;
  std::string text;
  int line;
  int col;
};

class LineLexer {
 public:
  LineLexer(std::string_view body, int line) : s_(body), line_(line) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  Token expect(Token::Kind k, const std::string& what) {
    if (tok_.kind != k)
      throw ParseError("expected " + what + ", got '" +
                           (tok_.kind == Token::End ? "end of statement" : tok_.text) +
                           "'",
                       {line_, tok_.col, std::max<int>(1, (int)tok_.text.size())});
    return take();
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    int col = static_cast<int>(pos_) + 1;
    if (pos_ >= s_.size()) {
      tok_ = {Token::End, "", line_, col};
      return;
    }
    char c = s_[pos_];
    auto two = s_.substr(pos_, 2);
    if (two == ":-" || two == ":=") {
      pos_ += 2;
      tok_ = {Token::Implies, std::string(two), line_, col};
      return;
    }
    if (two == "=<") {
      pos_ += 2;
      tok_ = {Token::CmpLe, "=<", line_, col};
      return;
    }
    if (two == ">=") {
      pos_ += 2;
      tok_ = {Token::CmpGe, ">=", line_, col};
      return;
    }
    switch (c) {
      case '~': ++pos_; tok_ = {Token::Tilde, "~", line_, col}; return;
      case '(': ++pos_; tok_ = {Token::LParen, "(", line_, col}; return;
      case ')': ++pos_; tok_ = {Token::RParen, ")", line_, col}; return;
      case '[': ++pos_; tok_ = {Token::LBracket, "[", line_, col}; return;
      case ']': ++pos_; tok_ = {Token::RBracket, "]", line_, col}; return;
      case ',': ++pos_; tok_ = {Token::Comma, ",", line_, col}; return;
      case ':': ++pos_; tok_ = {Token::Colon, ":", line_, col}; return;
      case '=': ++pos_; tok_ = {Token::CmpEq, "=", line_, col}; return;
      case '<': ++pos_; tok_ = {Token::CmpLt, "<", line_, col}; return;
      case '>': ++pos_; tok_ = {Token::CmpGt, ">", line_, col}; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        c == '.') {
      size_t start = pos_;
      if (c == '-' || c == '+') ++pos_;
      bool any = false;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        any = any || s_[pos_] != '.';
        ++pos_;
      }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
          ++pos_;
      }
      if (!any)
        throw ParseError("unexpected character '" + std::string(1, c) + "'",
                         {line_, col, 1});
      tok_ = {Token::Number, std::string(s_.substr(start, pos_ - start)), line_, col};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
      tok_ = {Token::Ident, std::string(s_.substr(start, pos_ - start)), line_, col};
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'",
                     {line_, col, 1});
  }

  std::string_view s_;
  size_t pos_ = 0;
  int line_;
  Token tok_;
};

struct RawDist {
  enum Kind { Bern, Disc, Gauss } kind;
  std::vector<std::pair<std::string, double>> entries;  // discrete
  double a = 0, b = 0;                                  // bern p / gauss m,s
  SourceSpan span;
};

struct RawAtom {
  std::string var;
  Cmp cmp;
  std::string value;
  SourceSpan span;
};

struct RawStatement {
  std::string head;
  RawDist dist;
  std::vector<RawAtom> body;
  SourceSpan span;
};

double token_number(const Token& t) {
  double out = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), out);
  if (ec != std::errc{} || p != t.text.data() + t.text.size())
    throw ParseError("bad number '" + t.text + "'",
                     {t.line, t.col, (int)t.text.size()});
  return out;
}

RawStatement parse_statement(std::string_view body, int line) {
  LineLexer lex(body, line);
  RawStatement st;
  Token head = lex.expect(Token::Ident, "variable name");
  st.head = head.text;
  st.span = {head.line, head.col, (int)head.text.size()};
  lex.expect(Token::Tilde, "'~'");

  Token dist_name = lex.expect(Token::Ident, "distribution");
  RawDist d;
  d.span = {dist_name.line, dist_name.col, (int)dist_name.text.size()};
  lex.expect(Token::LParen, "'('");
  if (dist_name.text == "bernoulli") {
    d.kind = RawDist::Bern;
    d.a = token_number(lex.expect(Token::Number, "probability"));
  } else if (dist_name.text == "gaussian") {
    d.kind = RawDist::Gauss;
    d.a = token_number(lex.expect(Token::Number, "mean"));
    lex.expect(Token::Comma, "','");
    d.b = token_number(lex.expect(Token::Number, "stddev"));
  } else if (dist_name.text == "discrete") {
    d.kind = RawDist::Disc;
    lex.expect(Token::LBracket, "'['");
    while (true) {
      Token val = lex.take();
      if (val.kind != Token::Ident && val.kind != Token::Number)
        throw ParseError("expected a value label",
                         {val.line, val.col, (int)val.text.size()});
      lex.expect(Token::Colon, "':'");
      double p = token_number(lex.expect(Token::Number, "probability"));
      for (auto& e : d.entries)
        if (e.first == val.text)
          throw ParseError("duplicate value '" + val.text + "'",
                           {val.line, val.col, (int)val.text.size()});
      d.entries.emplace_back(val.text, p);
      if (lex.peek().kind == Token::Comma) {
        lex.take();
        continue;
      }
      lex.expect(Token::RBracket, "']'");
      break;
    }
  } else {
    throw ParseError("unknown distribution '" + dist_name.text + "'", d.span);
  }
  lex.expect(Token::RParen, "')'");
  st.dist = d;

  if (lex.peek().kind == Token::Implies) {
    lex.take();
    while (true) {
      Token var = lex.expect(Token::Ident, "variable name");
      RawAtom a;
      a.var = var.text;
      a.span = {var.line, var.col, (int)var.text.size()};
      Token op = lex.take();
      switch (op.kind) {
        case Token::CmpEq: a.cmp = Cmp::Eq; break;
        case Token::CmpLt: a.cmp = Cmp::Lt; break;
        case Token::CmpLe: a.cmp = Cmp::Le; break;
        case Token::CmpGt: a.cmp = Cmp::Gt; break;
        case Token::CmpGe: a.cmp = Cmp::Ge; break;
        default:
          throw ParseError("expected a comparison operator",
                           {op.line, op.col, std::max<int>(1, (int)op.text.size())});
      }
      Token val = lex.take();
      if (val.kind != Token::Ident && val.kind != Token::Number)
        throw ParseError("expected a value",
                         {val.line, val.col, std::max<int>(1, (int)val.text.size())});
      a.value = val.text;
      st.body.push_back(a);
      if (lex.peek().kind == Token::Comma) {
        lex.take();
        continue;
      }
      break;
    }
  }
  Token end = lex.peek();
  if (end.kind != Token::End)
    throw ParseError("unexpected '" + end.text + "' after statement",
                     {end.line, end.col, (int)end.text.size()});
  return st;
}

std::vector<RawStatement> parse_statements(std::string_view text) {
  std::vector<RawStatement> out;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                 ? text.size() - pos
                                                 : eol - pos);
    ++line_no;
    size_t cut = line.find('%');
    if (cut != std::string_view::npos) line = line.substr(0, cut);
    size_t b = 0, e = line.size();
    while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    if (b != e) {
      if (line[e - 1] != '.')
        throw ParseError("statement must end with '.'", {line_no, (int)e, 1});
      out.push_back(parse_statement(line.substr(0, e - 1), line_no));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

bool numeric_label(const std::string& s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

RuleProgram build_program(const std::vector<RawStatement>& sts) {
  RuleProgram prog;

  // heads first: the distribution fixes kind and domain
  for (const auto& st : sts) {
    auto found = prog.vars.find(st.head);
    if (!found) {
      Variable v;
      v.name = st.head;
      switch (st.dist.kind) {
        case RawDist::Bern: v.domain = {"0", "1"}; break;
        case RawDist::Disc:
          for (auto& e : st.dist.entries) v.domain.push_back(e.first);
          break;
        case RawDist::Gauss: v.kind = VarKind::Continuous; break;
      }
      prog.vars.add(std::move(v));
      continue;
    }
    const Variable& v = prog.vars[*found];
    bool was_cont = v.kind == VarKind::Continuous;
    if (st.dist.kind == RawDist::Gauss) {
      if (!was_cont)
        throw ParseError("'" + st.head + "' is discrete but has a gaussian rule",
                         st.dist.span);
    } else if (was_cont) {
      throw ParseError("'" + st.head + "' is continuous but has a discrete rule",
                       st.dist.span);
    } else if (st.dist.kind == RawDist::Disc) {
      std::set<std::string> a(v.domain.begin(), v.domain.end());
      std::set<std::string> b;
      for (auto& e : st.dist.entries) b.insert(e.first);
      if (a != b)
        throw ParseError("domain of '" + st.head + "' differs between rules",
                         st.dist.span);
    } else if (v.domain != std::vector<std::string>{"0", "1"}) {
      throw ParseError("bernoulli rule for '" + st.head +
                           "' conflicts with its domain",
                       st.dist.span);
    }
  }

  // body-only variables: order comparisons make them continuous, equality
  // tests accumulate a domain in order of appearance
  std::set<std::string> head_names;
  for (const auto& st : sts) head_names.insert(st.head);
  for (const auto& st : sts)
    for (const auto& a : st.body) {
      auto found = prog.vars.find(a.var);
      if (!found) {
        Variable v;
        v.name = a.var;
        v.kind = a.cmp == Cmp::Eq ? VarKind::Discrete : VarKind::Continuous;
        prog.vars.add(std::move(v));
        found = prog.vars.find(a.var);
      }
      Variable& v = prog.vars[*found];
      bool is_head = head_names.count(a.var) > 0;
      if (a.cmp != Cmp::Eq) {
        if (v.kind == VarKind::Discrete) {
          if (is_head)
            throw ParseError("order comparison on discrete variable '" + a.var + "'",
                             a.span);
          v.kind = VarKind::Continuous;
          v.domain.clear();
        }
      } else if (v.kind == VarKind::Discrete && v.value_index(a.value) < 0) {
        if (is_head)
          throw ParseError("value '" + a.value + "' not in domain of '" + a.var + "'",
                           a.span);
        v.domain.push_back(a.value);  // domain inferred from use
      }
    }

  for (const auto& st : sts) {
    Rule rule;
    rule.head = *prog.vars.find(st.head);
    const Variable& head = prog.vars[rule.head];
    switch (st.dist.kind) {
      case RawDist::Bern: rule.dist = Bernoulli{st.dist.a}; break;
      case RawDist::Gauss: rule.dist = Gaussian{st.dist.a, st.dist.b}; break;
      case RawDist::Disc: {
        DiscreteDist d;
        d.probs.assign(head.domain.size(), 0.0);
        for (auto& e : st.dist.entries)
          d.probs[head.value_index(e.first)] = e.second;
        rule.dist = d;
        break;
      }
    }
    try {
      check_distribution(rule.dist, head);
    } catch (const ModelError& e) {
      throw ParseError(e.what(), st.dist.span);
    }

    for (const auto& a : st.body) {
      if (a.var == st.head)
        throw ParseError("'" + a.var + "' appears in its own rule body", a.span);
      Atom atom;
      atom.var = *prog.vars.find(a.var);
      atom.cmp = a.cmp;
      const Variable& v = prog.vars[atom.var];
      if (v.kind == VarKind::Discrete) {
        if (a.cmp != Cmp::Eq)
          throw ParseError("order comparison on discrete variable '" + a.var + "'",
                           a.span);
        int idx = v.value_index(a.value);
        if (idx < 0)
          throw ParseError("value '" + a.value + "' not in domain of '" + a.var + "'",
                           a.span);
        atom.value = idx;
      } else {
        double x;
        if (!numeric_label(a.value, x))
          throw ParseError("comparison with non-number '" + a.value + "'", a.span);
        atom.value = x;
      }
      rule.body.push_back(atom);
    }
    prog.rules.push_back(std::move(rule));
  }
  prog.finalize();
  return prog;
}

}  // namespace

RuleProgram parse_dcp_unchecked(std::string_view text) {
  return build_program(parse_statements(text));
}

RuleProgram parse_dcp(std::string_view text) {
  RuleProgram prog = parse_dcp_unchecked(text);
  ValidationReport report = validate_program(prog);
  if (!report.ok())
    throw ValidationError("invalid program:\n" + report.to_string(),
                          std::move(report));
  return prog;
}

RuleProgram load_dcp(const std::string& path) { return parse_dcp(read_file(path)); }

std::string serialize_dcp(const RuleProgram& prog) {
  std::vector<VarId> heads;
  for (VarId v = 0; v < prog.vars.size(); ++v)
    if (!prog.head_rules[v].empty()) heads.push_back(v);
  std::sort(heads.begin(), heads.end(), [&](VarId a, VarId b) {
    return prog.vars[a].name < prog.vars[b].name;
  });

  std::ostringstream os;
  for (VarId h : heads) {
    const Variable& head = prog.vars[h];
    for (int r : prog.head_rules[h]) {
      const Rule& rule = prog.rules[r];
      os << head.name << " ~ ";
      if (auto* b = std::get_if<Bernoulli>(&rule.dist)) {
        os << "bernoulli(" << fmt17(b->p) << ")";
      } else if (auto* d = std::get_if<DiscreteDist>(&rule.dist)) {
        os << "discrete([";
        for (size_t i = 0; i < d->probs.size(); ++i) {
          if (i) os << ",";
          os << head.domain[i] << ":" << fmt17(d->probs[i]);
        }
        os << "])";
      } else {
        const auto& g = std::get<Gaussian>(rule.dist);
        os << "gaussian(" << fmt17(g.mean) << "," << fmt17(g.stddev) << ")";
      }
      if (!rule.body.empty()) {
        os << " :- ";
        for (size_t i = 0; i < rule.body.size(); ++i) {
          const Atom& a = rule.body[i];
          if (i) os << ", ";
          const Variable& v = prog.vars[a.var];
          os << v.name << cmp_token(a.cmp)
             << (v.kind == VarKind::Discrete ? v.domain[vindex(a.value)]
                                             : fmt17(vreal(a.value)));
        }
      }
      os << ".\n";
    }
  }
  return os.str();
}

bool structurally_equal(const RuleProgram& a, const RuleProgram& b) {
  if (a.vars.size() != b.vars.size()) return false;
  for (const Variable& v : a.vars) {
    auto id = b.vars.find(v.name);
    if (!id) return false;
    const Variable& w = b.vars[*id];
    if (v.kind != w.kind || v.domain != w.domain) return false;
  }
  return serialize_dcp(a) == serialize_dcp(b);
}

// ---------------------------------------------------------------- BIF ----

namespace {

struct BifToken {
  std::string text;
  bool punct = false;
  int line = 1;
};

class BifLexer {
 public:
  explicit BifLexer(std::string_view text) {
    int line = 1;
    size_t i = 0;
    while (i < text.size()) {
      char c = text[i];
      if (c == '\n') {
        ++line;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      if (std::strchr("{}()|,;[]", c)) {
        toks_.push_back({std::string(1, c), true, line});
        ++i;
        continue;
      }
      size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             !std::strchr("{}()|,;[]", text[i]))
        ++i;
      toks_.push_back({std::string(text.substr(start, i - start)), false, line});
    }
    toks_.push_back({"", true, line});  // sentinel
  }

  const BifToken& peek(int ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  BifToken take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool done() const { return pos_ + 1 >= toks_.size(); }

  BifToken expect(const std::string& text) {
    BifToken t = take();
    if (t.text != text)
      throw ParseError("expected '" + text + "', got '" + t.text + "'",
                       {t.line, 1, 1});
    return t;
  }
  BifToken expect_word(const char* what) {
    BifToken t = take();
    if (t.punct || t.text.empty())
      throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'",
                       {t.line, 1, 1});
    return t;
  }
  void skip_until(const std::string& text) {
    while (!done() && peek().text != text) take();
    expect(text);
  }
  void skip_block() {  // after '{'
    int depth = 1;
    while (!done() && depth > 0) {
      BifToken t = take();
      if (t.text == "{") ++depth;
      if (t.text == "}") --depth;
    }
  }

 private:
  std::vector<BifToken> toks_;
  size_t pos_ = 0;
};

double bif_number(const BifToken& t) {
  double out;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), out);
  if (ec != std::errc{} || p != t.text.data() + t.text.size())
    throw ParseError("bad number '" + t.text + "'", {t.line, 1, 1});
  return out;
}

void normalize_row(std::vector<double>& row, const std::string& var, int line) {
  double sum = 0;
  for (double p : row) sum += p;
  if (std::abs(sum - 1.0) > 1e-6)
    throw ParseError("probabilities of '" + var + "' sum to " + std::to_string(sum),
                     {line, 1, 1});
  if (sum != 1.0)
    for (double& p : row) p /= sum;
}

}  // namespace

Network parse_bif(std::string_view text) {
  BifLexer lex(text);
  Network net;
  std::vector<std::vector<int>> filled;  // row seen markers, per var

  while (!lex.done()) {
    BifToken kw = lex.take();
    if (kw.text == "network") {
      lex.skip_until("{");
      lex.skip_block();
      continue;
    }
    if (kw.text == "variable") {
      BifToken name = lex.expect_word("variable name");
      lex.expect("{");
      Variable v;
      v.name = name.text;
      while (true) {
        BifToken t = lex.take();
        if (t.text == "}") break;
        if (t.text == "type") {
          lex.expect("discrete");
          lex.expect("[");
          BifToken n = lex.expect_word("domain size");
          lex.expect("]");
          lex.expect("{");
          while (lex.peek().text != "}") {
            v.domain.push_back(lex.expect_word("value").text);
            if (lex.peek().text == ",") lex.take();
          }
          lex.expect("}");
          if (lex.peek().text == ";") lex.take();
          if ((int)v.domain.size() != (int)bif_number(n))
            throw ParseError("domain size mismatch for '" + v.name + "'",
                             {n.line, 1, 1});
        } else if (t.text == "property") {
          lex.skip_until(";");
        } else if (t.text.empty()) {
          throw ParseError("unexpected end of file in variable block",
                           {t.line, 1, 1});
        }
      }
      if (v.domain.empty())
        throw ParseError("variable '" + v.name + "' has no type", {name.line, 1, 1});
      net.vars.add(std::move(v));
      net.parents.emplace_back();
      net.cpds.emplace_back(TabularCpd{});
      filled.emplace_back();
      continue;
    }
    if (kw.text == "probability") {
      lex.expect("(");
      BifToken child_tok = lex.expect_word("variable name");
      auto resolve = [&](const BifToken& tok) {
        std::optional<VarId> id = net.vars.find(tok.text);
        if (!id)
          throw ParseError("unknown variable '" + tok.text + "'", {tok.line, 1, 1});
        return *id;
      };
      VarId child = resolve(child_tok);
      std::vector<VarId>& parents = net.parents[child];
      if (!std::get<TabularCpd>(net.cpds[child]).rows.empty())
        throw ParseError("duplicate probability block for '" + child_tok.text + "'",
                         {child_tok.line, 1, 1});
      if (lex.peek().text == "|") {
        lex.take();
        while (lex.peek().text != ")") {
          parents.push_back(resolve(lex.expect_word("parent name")));
          if (lex.peek().text == ",") lex.take();
        }
      }
      lex.expect(")");
      lex.expect("{");

      int dom = static_cast<int>(net.vars[child].domain.size());
      int rows = net.row_count(child);
      auto& cpd = std::get<TabularCpd>(net.cpds[child]);
      cpd.rows.assign(rows, DiscreteDist{});
      filled[child].assign(rows, 0);

      while (true) {
        BifToken t = lex.take();
        if (t.text == "}") break;
        if (t.text == "property") {
          lex.skip_until(";");
          continue;
        }
        if (t.text == "table") {
          // one group of `dom` values per parent configuration, rightmost
          // parent varying fastest between groups
          std::vector<double> all;
          while (lex.peek().text != ";") {
            all.push_back(bif_number(lex.expect_word("probability")));
            if (lex.peek().text == ",") lex.take();
          }
          lex.take();
          if ((int)all.size() != rows * dom)
            throw ParseError("expected " + std::to_string(rows * dom) +
                                 " probabilities for '" + child_tok.text + "'",
                             {t.line, 1, 1});
          for (int r = 0; r < rows; ++r) {
            std::vector<double> row(all.begin() + r * dom,
                                    all.begin() + (r + 1) * dom);
            normalize_row(row, child_tok.text, t.line);
            cpd.rows[r] = DiscreteDist{std::move(row)};
            filled[child][r] = 1;
          }
          continue;
        }
        if (t.text == "(") {
          int row = 0;
          for (size_t i = 0; i < parents.size(); ++i) {
            BifToken val = lex.expect_word("parent value");
            int idx = net.vars[parents[i]].value_index(val.text);
            if (idx < 0)
              throw ParseError("value '" + val.text + "' not in domain of '" +
                                   net.vars[parents[i]].name + "'",
                               {val.line, 1, 1});
            row = row * (int)net.vars[parents[i]].domain.size() + idx;
            if (i + 1 < parents.size()) lex.expect(",");
          }
          lex.expect(")");
          std::vector<double> vals;
          while (lex.peek().text != ";") {
            vals.push_back(bif_number(lex.expect_word("probability")));
            if (lex.peek().text == ",") lex.take();
          }
          lex.take();
          if ((int)vals.size() != dom)
            throw ParseError("expected " + std::to_string(dom) +
                                 " probabilities for '" + child_tok.text + "'",
                             {t.line, 1, 1});
          normalize_row(vals, child_tok.text, t.line);
          cpd.rows[row] = DiscreteDist{std::move(vals)};
          filled[child][row] = 1;
          continue;
        }
        throw ParseError("unexpected '" + t.text + "' in probability block",
                         {t.line, 1, 1});
      }
      continue;
    }
    if (kw.text.empty()) break;
    throw ParseError("unexpected '" + kw.text + "'", {kw.line, 1, 1});
  }

  for (VarId v = 0; v < net.vars.size(); ++v) {
    const auto& rows = std::get<TabularCpd>(net.cpds[v]).rows;
    if (rows.empty())
      throw ParseError("no probability block for '" + net.vars[v].name + "'",
                       {1, 1, 1});
    for (int r = 0; r < (int)rows.size(); ++r)
      if (!filled[v][r])
        throw ParseError("missing probability row " + std::to_string(r) +
                             " for '" + net.vars[v].name + "'",
                         {1, 1, 1});
  }
  topological_order(net.vars, dag_of(net));  // rejects cyclic inputs
  return net;
}

Network load_bif(const std::string& path) { return parse_bif(read_file(path)); }

}  // namespace cslw
