#pragma once

#include <stdexcept>
#include <string>

namespace blocksense {

// Thrown when a measurement procedure tries to spend past its allowance.
// Procedures never truncate silently: running out of budget is a bug in the
// caller's schedule, not a recoverable condition.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
 public:
  io_error(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace blocksense
