#include "ptga/qsf.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

namespace ptga {

Qsf qsf_constant(const Rational& e)
{
  auto n = std::make_shared<QsfNode>();
  n->kind = QsfKind::constant;
  n->e = e;
  return n;
}

Qsf qsf_linear(const Rational& e, int clock)
{
  if (clock < 0)
    throw std::invalid_argument("linear leaf needs a clock");
  auto n = std::make_shared<QsfNode>();
  n->kind = QsfKind::linear;
  n->e = e;
  n->clock = clock;
  return n;
}

Qsf combine(QsfKind op, std::vector<Qsf> children, std::vector<Rational> weights)
{
  if (op == QsfKind::constant || op == QsfKind::linear)
    throw std::invalid_argument("combine expects min, max or convex");
  if (children.empty())
    throw std::invalid_argument("combine needs at least one child");
  for (auto const& c : children)
    if (!c)
      throw std::invalid_argument("null child");
  auto n = std::make_shared<QsfNode>();
  n->kind = op;
  if (op == QsfKind::convex) {
    if (weights.size() != children.size())
      throw std::invalid_argument("one weight per child is required");
    Rational sum = 0;
    for (auto const& w : weights) {
      if (w <= 0)
        throw std::invalid_argument("convex weights must be positive");
      sum += w;
    }
    if (sum != 1)
      throw std::invalid_argument("convex weights must sum to 1");
    n->weights = std::move(weights);
  }
  else if (!weights.empty())
    throw std::invalid_argument("weights only apply to convex nodes");
  n->children = std::move(children);
  return n;
}

namespace {

using Memo = std::unordered_map<const QsfNode*, Rational>;

Rational eval_memo(const Qsf& f, const ClockValuation& v, Memo& memo)
{
  switch (f->kind) {
  case QsfKind::constant: return f->e;
  case QsfKind::linear: return f->e - v[f->clock];
  default: break;
  }
  auto it = memo.find(f.get());
  if (it != memo.end())
    return it->second;
  Rational r;
  if (f->kind == QsfKind::convex) {
    r = 0;
    for (std::size_t i = 0; i < f->children.size(); ++i)
      r += f->weights[i] * eval_memo(f->children[i], v, memo);
  }
  else {
    r = eval_memo(f->children[0], v, memo);
    for (std::size_t i = 1; i < f->children.size(); ++i) {
      Rational x = eval_memo(f->children[i], v, memo);
      if (f->kind == QsfKind::min ? x < r : x > r)
        r = x;
    }
  }
  memo.emplace(f.get(), r);
  return r;
}

template <class Leaf>
Qsf map_leaves(const Qsf& f, Leaf&& leaf, std::unordered_map<const QsfNode*, Qsf>& memo)
{
  if (f->kind == QsfKind::constant || f->kind == QsfKind::linear)
    return leaf(f);
  auto it = memo.find(f.get());
  if (it != memo.end())
    return it->second;
  auto n = std::make_shared<QsfNode>(*f);
  for (auto& c : n->children)
    c = map_leaves(c, leaf, memo);
  Qsf out = n;
  memo.emplace(f.get(), out);
  return out;
}

}  // namespace

Rational eval_qsf(const Qsf& f, const ClockValuation& v)
{
  Memo memo;
  return eval_memo(f, v, memo);
}

Qsf elapse_transform(const Qsf& f, int clock, int i)
{
  std::unordered_map<const QsfNode*, Qsf> memo;
  return map_leaves(
      f,
      [&](const Qsf& leaf) {
        if (leaf->kind == QsfKind::constant)
          return qsf_linear(leaf->e + i, clock);
        return leaf;
      },
      memo);
}

Qsf reset_transform(const Qsf& f, ClockSet clocks)
{
  std::unordered_map<const QsfNode*, Qsf> memo;
  return map_leaves(
      f,
      [&](const Qsf& leaf) {
        if (leaf->kind == QsfKind::linear && contains_clock(clocks, leaf->clock))
          return qsf_constant(leaf->e);
        return leaf;
      },
      memo);
}

int tree_height(const Qsf& f)
{
  int h = 0;
  for (auto const& c : f->children)
    h = std::max(h, 1 + tree_height(c));
  return h;
}

bool well_formed(const Qsf& f)
{
  if (!f)
    return false;
  switch (f->kind) {
  case QsfKind::constant: return f->children.empty();
  case QsfKind::linear: return f->children.empty() && f->clock >= 0;
  case QsfKind::convex: {
    if (f->weights.size() != f->children.size() || f->children.empty())
      return false;
    Rational sum = 0;
    for (auto const& w : f->weights) {
      if (w <= 0)
        return false;
      sum += w;
    }
    if (sum != 1)
      return false;
    break;
  }
  default:
    if (f->children.empty() || !f->weights.empty())
      return false;
  }
  return std::all_of(f->children.begin(), f->children.end(), well_formed);
}

std::string to_string(const Qsf& f, const ClockNames& names)
{
  auto name = [&](int c) { return c < static_cast<int>(names.size()) ? names[c] : "c" + std::to_string(c); };
  switch (f->kind) {
  case QsfKind::constant: return "c:" + to_string(f->e);
  case QsfKind::linear: return "lin(" + to_string(f->e) + "," + name(f->clock) + ")";
  default: break;
  }
  std::string s = f->kind == QsfKind::min ? "min(" : f->kind == QsfKind::max ? "max(" : "conv(";
  for (std::size_t i = 0; i < f->children.size(); ++i) {
    if (i)
      s += ", ";
    if (f->kind == QsfKind::convex)
      s += to_string(f->weights[i]) + " ";
    s += to_string(f->children[i], names);
  }
  return s + ")";
}

namespace {

class QsfReader {
 public:
  QsfReader(const std::string& s, const ClockNames& names) : s_(s), names_(names) {}

  Qsf read_all()
  {
    Qsf f = read();
    skip();
    if (i_ != s_.size())
      fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const
  {
    throw std::invalid_argument("qsf text, column " + std::to_string(i_ + 1) + ": " + msg);
  }

  void skip()
  {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }

  bool eat(char c)
  {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!eat(c))
      fail(std::string("expected '") + c + "'");
  }

  std::string word()
  {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
      ++j;
    std::string w = s_.substr(i_, j - i_);
    i_ = j;
    return w;
  }

  Rational number()
  {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '/' || s_[j] == '.' ||
                             (j == i_ && s_[j] == '-')))
      ++j;
    if (j == i_)
      fail("expected a number");
    auto text = s_.substr(i_, j - i_);
    i_ = j;
    return parse_rational(text);
  }

  Qsf read()
  {
    auto w = word();
    if (w == "c") {
      expect(':');
      return qsf_constant(number());
    }
    if (w == "lin") {
      expect('(');
      Rational e = number();
      expect(',');
      auto c = word();
      auto it = std::find(names_.begin(), names_.end(), c);
      if (it == names_.end())
        fail("unknown clock '" + c + "'");
      expect(')');
      return qsf_linear(e, static_cast<int>(it - names_.begin()));
    }
    QsfKind k;
    if (w == "min")
      k = QsfKind::min;
    else if (w == "max")
      k = QsfKind::max;
    else if (w == "conv")
      k = QsfKind::convex;
    else
      fail("unknown node '" + w + "'");
    expect('(');
    std::vector<Qsf> kids;
    std::vector<Rational> ws;
    do {
      if (k == QsfKind::convex)
        ws.push_back(number());
      kids.push_back(read());
    } while (eat(','));
    expect(')');
    return combine(k, std::move(kids), std::move(ws));
  }

  const std::string& s_;
  const ClockNames& names_;
  std::size_t i_ = 0;
};

}  // namespace

Qsf parse_qsf(const std::string& text, const ClockNames& names) { return QsfReader(text, names).read_all(); }

}  // namespace ptga
