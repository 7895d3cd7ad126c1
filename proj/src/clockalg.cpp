#include "ptga/clockalg.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ptga {

ClockValuation::ClockValuation(std::vector<Rational> values, int bound) : values_(std::move(values)), bound_(bound)
{
  if (bound < 0)
    throw std::invalid_argument("clock bound must be non-negative");
  for (auto const& v : values_)
    if (v < 0 || v > bound)
      throw std::domain_error("clock value " + ptga::to_string(v) + " outside [0, " + std::to_string(bound) + "]");
}

ClockValuation ClockValuation::zero(std::size_t clocks, int bound)
{
  return ClockValuation(std::vector<Rational>(clocks, Rational(0)), bound);
}

ClockValuation ClockValuation::delayed(const Rational& t) const
{
  if (t < 0)
    throw std::domain_error("negative delay");
  std::vector<Rational> out(values_);
  for (auto& v : out)
    v += t;
  return ClockValuation(std::move(out), bound_);
}

ClockValuation ClockValuation::reset(ClockSet clocks) const
{
  ClockValuation out(*this);
  for (std::size_t c = 0; c < out.values_.size(); ++c)
    if (contains_clock(clocks, static_cast<int>(c)))
      out.values_[c] = 0;
  return out;
}

std::string ClockValuation::to_string(const ClockNames& names) const
{
  std::string s = "(";
  for (std::size_t c = 0; c < values_.size(); ++c) {
    if (c)
      s += ", ";
    s += (c < names.size() ? names[c] : "c" + std::to_string(c)) + "=" + ptga::to_string(values_[c]);
  }
  return s + ")";
}

Rational sup_distance(const ClockValuation& a, const ClockValuation& b)
{
  if (a.size() != b.size())
    throw std::invalid_argument("valuations over different clock sets");
  Rational d = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    Rational x = abs(a[c] - b[c]);
    if (x > d)
      d = x;
  }
  return d;
}

namespace {

const char* rel_text(Rel r)
{
  switch (r) {
  case Rel::lt: return "<";
  case Rel::le: return "<=";
  case Rel::eq: return "=";
  case Rel::ge: return ">=";
  case Rel::gt: return ">";
  }
  return "?";
}

std::string clock_name(const ClockNames& names, int c)
{
  return c < static_cast<int>(names.size()) ? names[c] : "c" + std::to_string(c);
}

}  // namespace

bool satisfies(const ClockValuation& v, const ClockConstraint& g)
{
  for (auto const& a : g.atoms) {
    if (a.lhs < 0 || a.lhs >= static_cast<int>(v.size()) || a.rhs >= static_cast<int>(v.size()))
      throw std::invalid_argument("constraint mentions a clock the valuation does not have");
    Rational lhs = v[a.lhs];
    if (a.rhs >= 0)
      lhs -= v[a.rhs];
    bool ok = false;
    switch (a.rel) {
    case Rel::lt: ok = lhs < a.bound; break;
    case Rel::le: ok = lhs <= a.bound; break;
    case Rel::eq: ok = lhs == a.bound; break;
    case Rel::ge: ok = lhs >= a.bound; break;
    case Rel::gt: ok = lhs > a.bound; break;
    }
    if (!ok)
      return false;
  }
  return true;
}

std::string to_string(const ClockConstraint& g, const ClockNames& names)
{
  if (g.atoms.empty())
    return "true";
  std::string s;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    auto const& a = g.atoms[i];
    if (i)
      s += " & ";
    s += clock_name(names, a.lhs);
    if (a.rhs >= 0)
      s += "-" + clock_name(names, a.rhs);
    s += rel_text(a.rel);
    s += std::to_string(a.bound);
  }
  return s;
}

// ---------------------------------------------------------------- DBM

bool tighter(const DbmBound& a, const DbmBound& b)
{
  if (a.infinite)
    return false;
  if (b.infinite)
    return true;
  return a.value < b.value || (a.value == b.value && a.strict && !b.strict);
}

DbmBound operator+(const DbmBound& a, const DbmBound& b)
{
  if (a.infinite || b.infinite)
    return DbmBound::inf();
  return {a.value + b.value, a.strict || b.strict, false};
}

Zone Zone::universe(int clocks, int bound)
{
  if (clocks < 0 || clocks > max_clocks)
    throw std::invalid_argument("unsupported number of clocks");
  Zone z;
  z.n_ = clocks;
  z.k_ = bound;
  z.m_.assign(static_cast<std::size_t>((clocks + 1) * (clocks + 1)), DbmBound::inf());
  for (int i = 0; i <= clocks; ++i)
    z.ref(i, i) = DbmBound::le(0);
  for (int i = 1; i <= clocks; ++i) {
    z.ref(i, 0) = DbmBound::le(bound);
    z.ref(0, i) = DbmBound::le(0);
  }
  z.close();
  return z;
}

Zone Zone::empty(int clocks, int bound)
{
  Zone z = universe(clocks, bound);
  z.empty_ = true;
  return z;
}

void Zone::close()
{
  if (empty_)
    return;
  int d = n_ + 1;
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) {
      if (at(i, k).infinite)
        continue;
      for (int j = 0; j < d; ++j) {
        DbmBound via = at(i, k) + at(k, j);
        if (tighter(via, at(i, j)))
          ref(i, j) = via;
      }
    }
  for (int i = 0; i < d; ++i)
    if (tighter(at(i, i), DbmBound::le(0))) {
      empty_ = true;
      return;
    }
}

void Zone::constrain(int i, int j, DbmBound b)
{
  if (empty_)
    return;
  if (tighter(b, at(i, j))) {
    ref(i, j) = b;
    close();
  }
}

Zone Zone::from_constraint(int clocks, int bound, const ClockConstraint& g)
{
  Zone z = universe(clocks, bound);
  for (auto const& a : g.atoms) {
    if (a.lhs < 0 || a.lhs >= clocks || a.rhs < -1 || a.rhs >= clocks || a.lhs == a.rhs)
      throw std::invalid_argument("atom refers to an unknown clock");
    if (a.bound < 0 || a.bound > bound)
      throw std::domain_error("constant " + std::to_string(a.bound) + " outside [0, " + std::to_string(bound) + "]");
    int l = a.lhs + 1, r = a.rhs + 1;
    switch (a.rel) {
    case Rel::le: z.constrain(l, r, DbmBound::le(a.bound)); break;
    case Rel::lt: z.constrain(l, r, DbmBound::lt(a.bound)); break;
    case Rel::ge: z.constrain(r, l, DbmBound::le(-a.bound)); break;
    case Rel::gt: z.constrain(r, l, DbmBound::lt(-a.bound)); break;
    case Rel::eq:
      z.constrain(l, r, DbmBound::le(a.bound));
      z.constrain(r, l, DbmBound::le(-a.bound));
      break;
    }
  }
  return z;
}

bool Zone::contains(const ClockValuation& v) const
{
  if (static_cast<int>(v.size()) != n_)
    throw std::invalid_argument("valuation over a different clock set");
  if (empty_)
    return false;
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; j <= n_; ++j) {
      auto const& b = at(i, j);
      if (i == j || b.infinite)
        continue;
      Rational diff = (i ? v[i - 1] : Rational(0)) - (j ? v[j - 1] : Rational(0));
      if (b.strict ? !(diff < b.value) : !(diff <= b.value))
        return false;
    }
  return true;
}

bool Zone::includes(const Region& r) const { return contains(r.representative()); }

Zone Zone::intersect(const Zone& o) const
{
  if (n_ != o.n_ || k_ != o.k_)
    throw std::invalid_argument("zones over different clock spaces");
  if (empty_ || o.empty_)
    return empty(n_, k_);
  Zone z = *this;
  for (std::size_t i = 0; i < m_.size(); ++i)
    if (tighter(o.m_[i], z.m_[i]))
      z.m_[i] = o.m_[i];
  z.close();
  return z;
}

Zone Zone::hull(const Zone& o) const
{
  if (n_ != o.n_ || k_ != o.k_)
    throw std::invalid_argument("zones over different clock spaces");
  if (empty_)
    return o;
  if (o.empty_)
    return *this;
  Zone z = *this;
  for (std::size_t i = 0; i < m_.size(); ++i)
    if (tighter(z.m_[i], o.m_[i]))
      z.m_[i] = o.m_[i];
  z.close();
  return z;
}

bool Zone::operator==(const Zone& o) const
{
  if (n_ != o.n_ || k_ != o.k_)
    return false;
  if (empty_ || o.empty_)
    return empty_ == o.empty_;
  return m_ == o.m_;
}

namespace {

Atom atom_of(int i, int j, const DbmBound& b)
{
  // x_i - x_j (<|<=) value, clock 0 being the reference
  if (j == 0)
    return {i - 1, -1, b.strict ? Rel::lt : Rel::le, b.value};
  if (i == 0)
    return {j - 1, -1, b.strict ? Rel::gt : Rel::ge, -b.value};
  if (b.value >= 0)
    return {i - 1, j - 1, b.strict ? Rel::lt : Rel::le, b.value};
  return {j - 1, i - 1, b.strict ? Rel::gt : Rel::ge, -b.value};
}

Atom equality_of(int i, int j, int value)
{
  if (j == 0)
    return {i - 1, -1, Rel::eq, value};
  if (i == 0)
    return {j - 1, -1, Rel::eq, -value};
  if (value >= 0)
    return {i - 1, j - 1, Rel::eq, value};
  return {j - 1, i - 1, Rel::eq, -value};
}

}  // namespace

ClockConstraint Zone::to_constraint() const
{
  if (empty_)
    throw std::domain_error("the empty zone has no conjunctive form");
  Zone u = universe(n_, k_);
  std::vector<Atom> atoms;
  int d = n_ + 1;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      auto const& b = at(i, j);
      auto const& back = at(j, i);
      bool t_ij = tighter(b, u.at(i, j));
      bool t_ji = tighter(back, u.at(j, i));
      if (!t_ij && !t_ji)
        continue;
      bool is_eq = !b.infinite && !b.strict && !back.infinite && !back.strict && back.value == -b.value;
      if (is_eq) {
        atoms.push_back(equality_of(i, j, b.value));
        continue;
      }
      if (t_ij)
        atoms.push_back(atom_of(i, j, b));
      if (t_ji)
        atoms.push_back(atom_of(j, i, back));
    }
  // Greedy redundancy elimination, diagonal atoms first, keeps the result
  // deterministic and readable.
  for (std::size_t idx = atoms.size(); idx-- > 0;) {
    ClockConstraint rest;
    for (std::size_t t = 0; t < atoms.size(); ++t)
      if (t != idx)
        rest.atoms.push_back(atoms[t]);
    if (from_constraint(n_, k_, rest) == *this)
      atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return {atoms};
}

std::string Zone::to_string(const ClockNames& names) const
{
  if (empty_)
    return "false";
  return ptga::to_string(to_constraint(), names);
}

// ---------------------------------------------------------------- regions

Region::Region(std::vector<int> integer_part, std::vector<int> frac_rank, int bound)
    : ints_(std::move(integer_part)), ranks_(std::move(frac_rank)), k_(bound)
{
  if (ints_.size() != ranks_.size())
    throw std::invalid_argument("region: mismatched encodings");
  std::set<int> seen;
  for (std::size_t c = 0; c < ints_.size(); ++c) {
    if (ints_[c] < 0 || ints_[c] > k_)
      throw std::invalid_argument("region: integer part outside [0, K]");
    if (ranks_[c] < 0)
      throw std::invalid_argument("region: negative rank");
    if (ints_[c] == k_ && ranks_[c] != 0)
      throw std::invalid_argument("region: clock above K");
    if (ranks_[c] > 0)
      seen.insert(ranks_[c]);
  }
  int expect = 1;
  for (int r : seen)
    if (r != expect++)
      throw std::invalid_argument("region: fractional ranks not contiguous");
}

int Region::classes() const
{
  int m = 0;
  for (int r : ranks_)
    m = std::max(m, r);
  return m;
}

bool Region::is_thin() const
{
  return std::find(ranks_.begin(), ranks_.end(), 0) != ranks_.end();
}

ClockValuation Region::representative() const
{
  int m = classes();
  std::vector<Rational> v;
  v.reserve(ints_.size());
  for (std::size_t c = 0; c < ints_.size(); ++c)
    v.emplace_back(Rational(ints_[c]) + ratio(ranks_[c], m + 1));
  return ClockValuation(std::move(v), k_);
}

Zone Region::to_zone() const
{
  int n = static_cast<int>(ints_.size());
  Zone z = Zone::universe(n, k_);
  for (int c = 0; c < n; ++c) {
    int i = c + 1;
    if (ranks_[c] == 0) {
      z.constrain(i, 0, DbmBound::le(ints_[c]));
      z.constrain(0, i, DbmBound::le(-ints_[c]));
    }
    else {
      z.constrain(i, 0, DbmBound::lt(ints_[c] + 1));
      z.constrain(0, i, DbmBound::lt(-ints_[c]));
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b)
        continue;
      int diff = ints_[a] - ints_[b];
      if (ranks_[a] == ranks_[b])
        z.constrain(a + 1, b + 1, DbmBound::le(diff));
      else if (ranks_[a] < ranks_[b])
        z.constrain(a + 1, b + 1, DbmBound::lt(diff));
      else
        z.constrain(a + 1, b + 1, DbmBound::lt(diff + 1));
    }
  return z;
}

std::string Region::to_string(const ClockNames& names) const { return to_zone().to_string(names); }

std::string Region::key() const
{
  std::string s;
  for (std::size_t c = 0; c < ints_.size(); ++c) {
    s += std::to_string(ints_[c]) + ":" + std::to_string(ranks_[c]) + ";";
  }
  return s;
}

bool Region::operator<(const Region& o) const
{
  if (ints_ != o.ints_)
    return ints_ < o.ints_;
  return ranks_ < o.ranks_;
}

Region region_of(const ClockValuation& v)
{
  std::vector<int> ints(v.size());
  std::vector<Rational> fr(v.size());
  std::vector<Rational> distinct;
  for (std::size_t c = 0; c < v.size(); ++c) {
    Rational f = floor_of(v[c]);
    ints[c] = static_cast<int>(f.get_num().get_si());
    fr[c] = v[c] - f;
    if (fr[c] != 0)
      distinct.push_back(fr[c]);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> ranks(v.size(), 0);
  for (std::size_t c = 0; c < v.size(); ++c)
    if (fr[c] != 0)
      ranks[c] = 1 + static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), fr[c]) - distinct.begin());
  return Region(std::move(ints), std::move(ranks), v.bound());
}

std::optional<Region> time_successor(const Region& r)
{
  std::vector<int> ints = r.integer_part();
  std::vector<int> ranks = r.frac_rank();
  if (r.is_thin()) {
    for (std::size_t c = 0; c < ints.size(); ++c)
      if (ranks[c] == 0 && ints[c] == r.bound())
        return std::nullopt;
    for (auto& k : ranks)
      ++k;
  }
  else {
    int m = r.classes();
    for (std::size_t c = 0; c < ints.size(); ++c)
      if (ranks[c] == m) {
        ++ints[c];
        ranks[c] = 0;
      }
  }
  if (ints.empty())
    return std::nullopt;
  return Region(std::move(ints), std::move(ranks), r.bound());
}

Region region_reset(const Region& r, ClockSet clocks)
{
  std::vector<int> ints = r.integer_part();
  std::vector<int> ranks = r.frac_rank();
  for (std::size_t c = 0; c < ints.size(); ++c)
    if (contains_clock(clocks, static_cast<int>(c))) {
      ints[c] = 0;
      ranks[c] = 0;
    }
  std::set<int> used;
  for (int k : ranks)
    if (k)
      used.insert(k);
  std::vector<int> renumber(static_cast<std::size_t>(r.classes()) + 1, 0);
  int next = 1;
  for (int k : used)
    renumber[k] = next++;
  for (auto& k : ranks)
    k = renumber[k];
  return Region(std::move(ints), std::move(ranks), r.bound());
}

std::vector<Region> future_chain(const Region& r)
{
  std::vector<Region> chain{r};
  while (auto next = time_successor(chain.back()))
    chain.push_back(*next);
  return chain;
}

std::optional<int> chain_position(const Region& from, const Region& to)
{
  if (from.clocks() != to.clocks() || from.bound() != to.bound())
    return std::nullopt;
  Region cur = from;
  for (int pos = 0;; ++pos) {
    if (cur == to)
      return pos;
    auto next = time_successor(cur);
    if (!next)
      return std::nullopt;
    cur = *next;
  }
}

bool strictly_precedes(const Region& a, const Region& b)
{
  auto pos = chain_position(a, b);
  return pos && *pos > 0;
}

Zone zone_between(const Region& from, const Region& to)
{
  auto chain = future_chain(from);
  Zone z = Zone::empty(static_cast<int>(from.clocks()), from.bound());
  for (auto const& r : chain) {
    z = z.hull(r.to_zone());
    if (r == to)
      return z;
  }
  throw std::domain_error("zone_between: target region is not in the future of the source region");
}

Rational DelayTerm::eval(const ClockValuation& v) const
{
  if (clock < 0)
    return 0;
  return Rational(k) - v[clock];
}

namespace {

int first_zero_clock(const Region& r)
{
  for (std::size_t c = 0; c < r.clocks(); ++c)
    if (r.frac_rank()[c] == 0)
      return static_cast<int>(c);
  return -1;
}

int first_max_clock(const Region& r)
{
  int m = r.classes();
  for (std::size_t c = 0; c < r.clocks(); ++c)
    if (r.frac_rank()[c] == m)
      return static_cast<int>(c);
  return -1;
}

}  // namespace

std::pair<DelayTerm, DelayTerm> delay_forms(const Region& from, const Region& to)
{
  auto chain = future_chain(from);
  auto it = std::find(chain.begin(), chain.end(), to);
  if (it == chain.end())
    throw std::domain_error("delay bounds: target region is not in the future of the source region");
  auto m = it - chain.begin();
  DelayTerm lo, hi;
  if (to.is_thin()) {
    if (m > 0) {
      int c = first_zero_clock(to);
      lo = hi = {c, to.integer_part()[c]};
    }
    return {lo, hi};
  }
  if (m > 0) {
    auto const& prev = chain[m - 1];
    int c = first_zero_clock(prev);
    lo = {c, prev.integer_part()[c]};
  }
  int c = first_max_clock(to);
  hi = {c, to.integer_part()[c] + 1};
  return {lo, hi};
}

std::pair<Rational, Rational> delay_bounds(const ClockValuation& v, const Region& to)
{
  auto forms = delay_forms(region_of(v), to);
  return {forms.first.eval(v), forms.second.eval(v)};
}

FracSignature fractional_signature(const ClockValuation& v)
{
  std::vector<Rational> fr{Rational(0)};
  for (auto const& x : v.values())
    fr.push_back(frac_of(x));
  std::sort(fr.begin(), fr.end());
  fr.erase(std::unique(fr.begin(), fr.end()), fr.end());
  return {fr};
}

FracSignature k_shift(const FracSignature& sig, int k)
{
  int size = static_cast<int>(sig.fracs.size());
  if (k < 0 || k >= size)
    throw std::out_of_range("k-shift index out of range");
  std::vector<Rational> out;
  out.reserve(sig.fracs.size());
  for (int i = 0; i < size; ++i)
    out.push_back(frac_of(sig.fracs[(i + k) % size] + 1 - sig.fracs[k]));
  std::sort(out.begin(), out.end());
  return {out};
}

bool is_subsequence(const FracSignature& sub, const FracSignature& sig)
{
  std::size_t j = 0;
  for (auto const& f : sub.fracs) {
    while (j < sig.fracs.size() && sig.fracs[j] < f)
      ++j;
    if (j == sig.fracs.size() || sig.fracs[j] != f)
      return false;
  }
  return true;
}

}  // namespace ptga
