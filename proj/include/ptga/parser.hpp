#pragma once

#include "ptga/model.hpp"

#include <stdexcept>
#include <string>

namespace ptga {

struct ModelSource {
  std::string text;
  std::string origin = "<inline>";
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& origin, int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

Ptga parse_model(const ModelSource& src);
Ptga parse_model_file(const std::string& path);
std::string serialize_model(const Ptga& model);

// Constraint text over the given clocks, e.g. "x<=2 & x-y>1".
Zone parse_zone(const std::string& text, const ClockNames& clocks, int bound);

}  // namespace ptga
