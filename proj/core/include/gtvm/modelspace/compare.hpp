#pragma once

#include <string>
#include <vector>

#include "gtvm/modelspace/model_space.hpp"

namespace gtvm::model {

struct DiffOptions {
  /// Compare up to a renaming of ids. Auto-generated names are ignored too.
  bool ignore_ids = false;
  /// Do not compare containment parents.
  bool ignore_containment = false;
};

struct DiffResult {
  bool equal = true;
  std::vector<std::string> differences;
};

/// Structural comparison. Types are compared by name, so the two spaces may
/// use different registries.
DiffResult compare(const ModelSpace& a, const ModelSpace& b, const DiffOptions& options = {});

}  // namespace gtvm::model
