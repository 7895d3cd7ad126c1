#pragma once

#include "ptga/clockalg.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ptga {

enum class QsfKind { constant, linear, min, max, convex };

struct QsfNode;
using Qsf = std::shared_ptr<const QsfNode>;

// Leaves: `constant` e, or `linear` e - nu(clock). Inner nodes share
// children freely, so trees are DAGs in memory.
struct QsfNode {
  QsfKind kind = QsfKind::constant;
  Rational e;
  int clock = -1;
  std::vector<Rational> weights;  // convex only
  std::vector<Qsf> children;
};

Qsf qsf_constant(const Rational& e);
Qsf qsf_linear(const Rational& e, int clock);
// Throws std::invalid_argument on an empty child list or bad weights.
Qsf combine(QsfKind op, std::vector<Qsf> children, std::vector<Rational> weights = {});

Rational eval_qsf(const Qsf& f, const ClockValuation& v);
Qsf elapse_transform(const Qsf& f, int clock, int i);
Qsf reset_transform(const Qsf& f, ClockSet clocks);
int tree_height(const Qsf& f);
bool well_formed(const Qsf& f);

// Prefix form: c:1/2, lin(1,x), min(...), max(...), conv(1/2 f, 1/2 g).
std::string to_string(const Qsf& f, const ClockNames& names);
Qsf parse_qsf(const std::string& text, const ClockNames& names);

}  // namespace ptga
