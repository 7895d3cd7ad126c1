#include "ptga/parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace ptga {

ParseError::ParseError(const std::string& origin, int line, int column, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column), detail_(message)
{
}

namespace {

enum class Tok { ident, number, symbol, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int column = 1;
};

const std::set<std::string> keywords{"clocks", "bound", "location", "inv", "edge", "min", "max", "from",
                                     "guard", "reset", "target", "init", "true", "false"};

std::vector<Token> lex(const ModelSource& src)
{
  std::vector<Token> out;
  const std::string& s = src.text;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      }
      else
        ++col;
    }
  };
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '#' || (ch == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
      while (i < s.size() && s[i] != '\n')
        advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      t.kind = Tok::ident;
      t.text = s.substr(i, j - i);
    }
    else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
        ++j;
      if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
          ++j;
      }
      t.kind = Tok::number;
      t.text = s.substr(i, j - i);
    }
    else {
      static const char* two[] = {"->", "<=", ">=", "=="};
      t.kind = Tok::symbol;
      for (auto const* op : two)
        if (s.compare(i, 2, op) == 0)
          t.text = op;
      if (t.text.empty()) {
        if (std::string("<>=;{}(),&-/+").find(ch) == std::string::npos)
          throw ParseError(src.origin, line, col, std::string("unexpected character '") + ch + "'");
        t.text = std::string(1, ch);
      }
    }
    advance(t.text.size());
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

struct PendingRef {
  std::string name;
  Token at;
};

class Parser {
 public:
  explicit Parser(const ModelSource& src) : src_(src), toks_(lex(src)) {}

  Ptga run()
  {
    prescan_bound();
    while (peek().kind != Tok::end) {
      auto const& t = peek();
      if (is_kw(t, "clocks"))
        parse_clocks();
      else if (is_kw(t, "bound"))
        parse_bound();
      else if (is_kw(t, "location"))
        parse_location();
      else if (is_kw(t, "edge"))
        parse_edge();
      else if (is_kw(t, "target"))
        parse_target();
      else if (is_kw(t, "init"))
        parse_init();
      else
        fail(t, "expected a declaration (clocks, bound, location, edge, target or init), got '" + t.text + "'");
    }
    resolve();
    return std::move(m_);
  }

  Zone constraint_only()
  {
    Zone z = parse_constraint();
    if (peek().kind != Tok::end)
      fail(peek(), "unexpected '" + peek().text + "' after constraint");
    return z;
  }

  void preset(const ClockNames& clocks, int bound)
  {
    m_.clocks = clocks;
    m_.bound = bound;
    have_clocks_ = have_bound_ = true;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const
  {
    throw ParseError(src_.origin, t.line, t.column, msg);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  static bool is_kw(const Token& t, const char* kw) { return t.kind == Tok::ident && t.text == kw; }
  static bool is_sym(const Token& t, const char* s) { return t.kind == Tok::symbol && t.text == s; }

  void expect_sym(const char* s)
  {
    if (!is_sym(peek(), s))
      fail(peek(), std::string("expected '") + s + "', got '" + (peek().kind == Tok::end ? "end of input" : peek().text) + "'");
    next();
  }

  void expect_kw(const char* kw)
  {
    if (!is_kw(peek(), kw))
      fail(peek(), std::string("expected '") + kw + "'");
    next();
  }

  Token ident(const char* what)
  {
    auto const& t = peek();
    if (t.kind != Tok::ident)
      fail(t, std::string("expected ") + what);
    if (keywords.count(t.text))
      fail(t, "'" + t.text + "' is a reserved word");
    return next();
  }

  void optional_semicolon()
  {
    if (is_sym(peek(), ";"))
      next();
  }

  void prescan_bound()
  {
    bool found = false;
    int largest = 0;
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      if (is_kw(toks_[i], "bound"))
        found = true;
      auto const& t = toks_[i];
      if (t.kind == Tok::symbol && (t.text == "<" || t.text == "<=" || t.text == "=" || t.text == "==" ||
                                    t.text == ">=" || t.text == ">") &&
          toks_[i + 1].kind == Tok::number && toks_[i + 1].text.find('.') == std::string::npos)
        largest = std::max(largest, std::stoi(toks_[i + 1].text));
    }
    if (!found)
      fail(toks_.front(), "missing 'bound' declaration; the largest constant in the model is " +
                              std::to_string(largest) + ", confirm it with 'bound " +
                              std::to_string(std::max(largest, 1)) + ";'");
  }

  void need_space(const Token& at)
  {
    if (!have_clocks_ || !have_bound_)
      fail(at, "'clocks' and 'bound' must be declared before locations and edges");
  }

  void parse_clocks()
  {
    auto kw = next();
    if (have_clocks_)
      fail(kw, "duplicate 'clocks' declaration");
    if (!m_.locations.empty() || !m_.edges.empty())
      fail(kw, "'clocks' must precede locations and edges");
    while (peek().kind == Tok::ident) {
      auto t = ident("a clock name");
      if (m_.find_clock(t.text) >= 0)
        fail(t, "duplicate clock '" + t.text + "'");
      m_.clocks.push_back(t.text);
    }
    if (m_.clocks.size() > static_cast<std::size_t>(max_clocks))
      fail(kw, "at most 32 clocks are supported");
    expect_sym(";");
    have_clocks_ = true;
  }

  void parse_bound()
  {
    auto kw = next();
    if (have_bound_)
      fail(kw, "duplicate 'bound' declaration");
    auto t = peek();
    if (t.kind != Tok::number || t.text.find('.') != std::string::npos)
      fail(t, "expected a positive integer bound");
    next();
    m_.bound = std::stoi(t.text);
    if (m_.bound < 1)
      fail(t, "the clock bound must be positive");
    expect_sym(";");
    have_bound_ = true;
  }

  Rational rational()
  {
    auto t = peek();
    if (t.kind != Tok::number)
      fail(t, "expected a number");
    next();
    std::string text = t.text;
    if (is_sym(peek(), "/")) {
      next();
      auto d = peek();
      if (d.kind != Tok::number || d.text.find('.') != std::string::npos || t.text.find('.') != std::string::npos)
        fail(d, "expected an integer denominator");
      next();
      text += "/" + d.text;
    }
    try {
      return parse_rational(text);
    }
    catch (std::exception const& ex) {
      fail(t, ex.what());
    }
  }

  int clock_ref()
  {
    auto t = ident("a clock name");
    int c = m_.find_clock(t.text);
    if (c < 0)
      fail(t, "unknown clock '" + t.text + "'");
    return c;
  }

  Zone parse_constraint()
  {
    if (is_kw(peek(), "true")) {
      next();
      return m_.universe();
    }
    if (is_kw(peek(), "false")) {
      next();
      return Zone::empty(m_.clock_count(), m_.bound);
    }
    ClockConstraint g;
    while (true) {
      Atom a;
      a.lhs = clock_ref();
      if (is_sym(peek(), "-")) {
        next();
        a.rhs = clock_ref();
        if (a.rhs == a.lhs)
          fail(toks_[pos_ - 1], "difference of a clock with itself");
      }
      auto op = peek();
      if (op.kind != Tok::symbol)
        fail(op, "expected a comparison operator");
      if (op.text == "<")
        a.rel = Rel::lt;
      else if (op.text == "<=")
        a.rel = Rel::le;
      else if (op.text == "=" || op.text == "==")
        a.rel = Rel::eq;
      else if (op.text == ">=")
        a.rel = Rel::ge;
      else if (op.text == ">")
        a.rel = Rel::gt;
      else
        fail(op, "expected a comparison operator, got '" + op.text + "'");
      next();
      auto num = peek();
      if (num.kind != Tok::number || num.text.find('.') != std::string::npos)
        fail(num, "clock constraints compare against integers");
      next();
      if (is_sym(peek(), "/"))
        fail(num, "clock constraints compare against integers");
      a.bound = std::stoi(num.text);
      if (a.bound > m_.bound)
        fail(num, "constant " + num.text + " exceeds the clock bound " + std::to_string(m_.bound));
      g.atoms.push_back(a);
      if (!is_sym(peek(), "&"))
        break;
      next();
    }
    return Zone::from_constraint(m_.clock_count(), m_.bound, g);
  }

  void parse_location()
  {
    auto kw = next();
    need_space(kw);
    auto name = ident("a location name");
    if (m_.find_location(name.text) >= 0)
      fail(name, "duplicate location '" + name.text + "'");
    Location loc{name.text, m_.universe()};
    expect_sym("{");
    if (is_kw(peek(), "inv")) {
      next();
      loc.invariant = parse_constraint();
    }
    expect_sym("}");
    optional_semicolon();
    m_.locations.push_back(std::move(loc));
    m_.target.push_back(false);
  }

  void parse_edge()
  {
    auto kw = next();
    need_space(kw);
    Edge e;
    if (is_kw(peek(), "min"))
      e.player = Player::min;
    else if (is_kw(peek(), "max"))
      e.player = Player::max;
    else
      fail(peek(), "expected 'min' or 'max'");
    next();
    auto act = ident("an action name");
    e.action = act.text;
    expect_kw("from");
    auto src = ident("a location name");
    e.guard = m_.universe();
    if (is_kw(peek(), "guard")) {
      next();
      e.guard = parse_constraint();
    }
    expect_sym("{");
    std::vector<PendingRef> targets;
    while (!is_sym(peek(), "}")) {
      Branch b;
      b.probability = rational();
      if (is_kw(peek(), "reset")) {
        next();
        if (peek().kind != Tok::ident || keywords.count(peek().text))
          fail(peek(), "expected at least one clock after 'reset'");
        while (peek().kind == Tok::ident && !keywords.count(peek().text)) {
          auto t = peek();
          int c = clock_ref();
          if (contains_clock(b.resets, c))
            fail(t, "clock '" + t.text + "' reset twice");
          b.resets |= ClockSet(1) << c;
        }
      }
      expect_sym("->");
      targets.push_back({ident("a target location").text, toks_[pos_ - 1]});
      e.branches.push_back(b);
      if (!is_sym(peek(), ";"))
        break;
      next();
    }
    expect_sym("}");
    optional_semicolon();
    if (e.branches.empty())
      fail(act, "edge without branches");
    edge_sources_.push_back({src.text, src});
    edge_action_tok_.push_back(act);
    branch_targets_.push_back(std::move(targets));
    m_.edges.push_back(std::move(e));
  }

  void parse_target()
  {
    next();
    do {
      if (is_sym(peek(), ","))
        next();
      auto t = ident("a location name");
      target_refs_.push_back({t.text, t});
    } while (peek().kind == Tok::ident || is_sym(peek(), ","));
    expect_sym(";");
  }

  void parse_init()
  {
    auto kw = next();
    need_space(kw);
    if (init_loc_)
      fail(kw, "duplicate 'init' declaration");
    auto loc = ident("a location name");
    init_loc_ = PendingRef{loc.text, loc};
    init_values_.assign(m_.clocks.size(), Rational(0));
    std::vector<bool> given(m_.clocks.size(), false);
    expect_sym("(");
    while (!is_sym(peek(), ")")) {
      auto t = peek();
      int c = clock_ref();
      if (given[c])
        fail(t, "clock '" + t.text + "' assigned twice");
      given[c] = true;
      expect_sym("=");
      auto vt = peek();
      Rational v = rational();
      if (v < 0 || v > m_.bound)
        fail(vt, "initial clock value outside [0, " + std::to_string(m_.bound) + "]");
      init_values_[c] = v;
      if (!is_sym(peek(), ","))
        break;
      next();
    }
    expect_sym(")");
    expect_sym(";");
  }

  int resolve_location(const PendingRef& r) const
  {
    int l = m_.find_location(r.name);
    if (l < 0)
      fail(r.at, "unknown location '" + r.name + "'");
    return l;
  }

  void resolve()
  {
    if (!have_clocks_)
      fail(toks_.back(), "missing 'clocks' declaration");
    if (m_.locations.empty())
      fail(toks_.back(), "the model declares no location");
    std::set<std::pair<int, std::string>> rows;
    for (std::size_t e = 0; e < m_.edges.size(); ++e) {
      m_.edges[e].location = resolve_location(edge_sources_[e]);
      if (!rows.insert({m_.edges[e].location, m_.edges[e].action}).second)
        fail(edge_action_tok_[e], "duplicate edge for action '" + m_.edges[e].action + "' at location '" +
                                      edge_sources_[e].name + "'");
      for (std::size_t b = 0; b < branch_targets_[e].size(); ++b)
        m_.edges[e].branches[b].target = resolve_location(branch_targets_[e][b]);
    }
    for (auto const& t : target_refs_) {
      int l = resolve_location(t);
      if (m_.target[l])
        fail(t.at, "location '" + t.name + "' listed as target twice");
      m_.target[l] = true;
    }
    if (init_loc_)
      m_.init = Configuration{resolve_location(*init_loc_), ClockValuation(init_values_, m_.bound)};
  }

  const ModelSource& src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Ptga m_;
  bool have_clocks_ = false;
  bool have_bound_ = false;
  std::vector<PendingRef> edge_sources_;
  std::vector<Token> edge_action_tok_;
  std::vector<std::vector<PendingRef>> branch_targets_;
  std::vector<PendingRef> target_refs_;
  std::optional<PendingRef> init_loc_;
  std::vector<Rational> init_values_;
};

}  // namespace

Ptga parse_model(const ModelSource& src) { return Parser(src).run(); }

Ptga parse_model_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model({buf.str(), path});
}

Zone parse_zone(const std::string& text, const ClockNames& clocks, int bound)
{
  ModelSource src{text, "<constraint>"};
  Parser p(src);
  p.preset(clocks, bound);
  return p.constraint_only();
}

std::string serialize_model(const Ptga& m)
{
  std::ostringstream out;
  out << "clocks";
  for (auto const& c : m.clocks)
    out << ' ' << c;
  out << ";\nbound " << m.bound << ";\n\n";
  for (auto const& l : m.locations) {
    out << "location " << l.name << " {";
    if (l.invariant != m.universe())
      out << " inv " << l.invariant.to_string(m.clocks);
    out << " }\n";
  }
  if (!m.edges.empty())
    out << '\n';
  for (auto const& e : m.edges) {
    out << "edge " << to_string(e.player) << ' ' << e.action << " from " << m.locations[e.location].name;
    if (e.guard != m.universe())
      out << " guard " << e.guard.to_string(m.clocks);
    out << " {";
    for (std::size_t b = 0; b < e.branches.size(); ++b) {
      auto const& br = e.branches[b];
      out << (b ? "; " : " ") << to_string(br.probability);
      if (br.resets)
        out << " reset " << m.reset_text(br.resets);
      out << " -> " << m.locations[br.target].name;
    }
    out << " }\n";
  }
  bool any_target = false;
  for (std::size_t l = 0; l < m.locations.size(); ++l)
    if (m.target[l]) {
      out << (any_target ? " " : "\ntarget ") << m.locations[l].name;
      any_target = true;
    }
  if (any_target)
    out << ";\n";
  if (m.init) {
    out << "init " << m.locations[m.init->location].name << " (";
    for (int c = 0; c < m.clock_count(); ++c)
      out << (c ? ", " : "") << m.clocks[c] << '=' << to_string(m.init->valuation[c]);
    out << ");\n";
  }
  return out.str();
}

}  // namespace ptga
