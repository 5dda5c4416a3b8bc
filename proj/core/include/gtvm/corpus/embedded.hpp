#pragma once

#include <string_view>
#include <vector>

namespace gtvm::corpus {

struct EmbeddedFile {
  std::string_view name;
  std::string_view text;
};

const std::vector<EmbeddedFile>& embedded_programs();
const std::vector<EmbeddedFile>& embedded_fixtures();

}  // namespace gtvm::corpus
