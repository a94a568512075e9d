#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace memhls {

// A single finding from one of the validators. `code` is a stable short tag
// ("polarity", "cycle", "unmapped", ...) that tests and tools can match on.
struct Diagnostic {
  std::string code;
  std::string subject;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  std::string out = d.code;
  if (!d.subject.empty()) out += " [" + d.subject + "]";
  if (!d.message.empty()) out += ": " + d.message;
  return out;
}

inline bool has_code(const std::vector<Diagnostic>& diags, const std::string& code) {
  for (const auto& d : diags)
    if (d.code == code) return true;
  return false;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax or semantic error in one of the text formats. line/column are
// 1-based; 0 means "not tied to a position".
class ParseError : public Error {
 public:
  ParseError(std::string message, int line = 0, int column = 0)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diags)
      : Error(summary(diags)), diagnostics_(std::move(diags)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summary(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
      if (!out.empty()) out += "; ";
      out += to_string(d);
    }
    return out.empty() ? "validation failed" : out;
  }

  std::vector<Diagnostic> diagnostics_;
};

// Critical path longer than the cadence.
class InfeasibleError : public Error {
 public:
  InfeasibleError(int critical_path, int cadence)
      : Error("critical path " + std::to_string(critical_path) + " exceeds cadence " +
              std::to_string(cadence)),
        critical_path_(critical_path),
        cadence_(cadence) {}

  int critical_path() const { return critical_path_; }
  int cadence() const { return cadence_; }

 private:
  int critical_path_;
  int cadence_;
};

// The list scheduler could not start `vertex` by its deadline.
// `resource` names what blocked it: "mul", "alu", "bank1", or "dependence".
class DeadlineMiss : public Error {
 public:
  DeadlineMiss(int cycle, std::string vertex, std::string resource)
      : Error("deadline miss at cycle " + std::to_string(cycle) + ": " + vertex +
              " blocked by " + resource),
        cycle_(cycle),
        vertex_(std::move(vertex)),
        resource_(std::move(resource)) {}

  int cycle() const { return cycle_; }
  const std::string& vertex() const { return vertex_; }
  const std::string& resource() const { return resource_; }

 private:
  int cycle_;
  std::string vertex_;
  std::string resource_;
};

}  // namespace memhls
