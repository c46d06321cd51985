#pragma once

#include <string>

#include "vfc/model.hpp"

namespace vfc {

// Writes the model as deterministic CPLEX-LP-format text. Variable names are
// taken from the model (sanitized), so repeated exports of the same model are
// byte-identical.
void write_lp_file(const ModelInstance& model, const std::string& path);

std::string lp_format_text(const ModelInstance& model);

// Hands a model to an external solver: writes the LP file, runs the
// configured command (with {model} and {solution} placeholders substituted),
// and parses a solution file of `name value` lines.
class ExternalSolver {
 public:
  explicit ExternalSolver(std::string command) : command_(std::move(command)) {}

  Solution solve(const ModelInstance& model, const std::string& workdir) const;

  // Parse step exposed separately so the file contract is testable without
  // invoking a process.
  static Solution parse_solution_file(const ModelInstance& model, const std::string& path);

 private:
  std::string command_;
};

}  // namespace vfc
