// Error taxonomy shared by the library and the CLI. Each category maps to a
// stable process exit code so scripts can distinguish failure modes.

#ifndef DIRCOUNT_ERRORS_HPP
#define DIRCOUNT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dircount {

enum class ExitCode : int {
  ok = 0,
  usage = 1,   // bad flags / malformed request
  graph = 2,   // graph fails validation (parse, connectivity, labelling)
  solver = 3,  // numerical routine failed to converge or lost precision
  budget = 4,  // enumeration / DP memory or work cap exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

class GraphError : public Error {
 public:
  explicit GraphError(const std::string& what) : Error(ExitCode::graph, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ExitCode::solver, what) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what)
      : Error(ExitCode::budget, what) {}
};

}  // namespace dircount

#endif  // DIRCOUNT_ERRORS_HPP
