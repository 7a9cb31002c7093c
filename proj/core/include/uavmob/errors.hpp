#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmob {

/// Raised when a constraint system has no feasible solution. `indices` names
/// the offending entities (supply nodes, devices, ...), ascending.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::size_t> indices = {})
      : std::runtime_error(what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

}  // namespace uavmob
