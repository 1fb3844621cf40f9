#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "graphfx/graph.hpp"

namespace graphfx {

enum class ViolationCode { cyclic, disconnected, missing_inlet, bad_endpoint, kind_mismatch };

std::string_view code_name(ViolationCode c);

struct Violation {
  ViolationCode code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const noexcept { return violations.empty(); }
  bool has(ViolationCode c) const;
};

// Lists every structural violation. Never throws.
ValidationReport validate(const Graph& g);

// Throws InvalidGraphError carrying the first violation when g is invalid.
void require_valid(const Graph& g);

}  // namespace graphfx
