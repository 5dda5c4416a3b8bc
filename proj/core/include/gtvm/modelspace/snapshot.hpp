#pragma once

#include <iosfwd>
#include <string>

#include "gtvm/modelspace/model_space.hpp"

namespace gtvm::model {

/// Writes the `.gms` text form: non-builtin types, then entities parent-first,
/// then relations endpoint-first. Names equal to the auto-generated one are
/// omitted.
void write_snapshot(const ModelSpace& space, std::ostream& out);
std::string to_snapshot(const ModelSpace& space);

/// Reads a snapshot into a fresh space whose registry starts as `base`.
/// `type` directives extend it. Throws ParseError, with the offending line,
/// on malformed input and on dangling references.
ModelSpace read_snapshot(std::istream& in, TypeRegistry base);
ModelSpace from_snapshot(const std::string& text, TypeRegistry base);

ModelSpace load_snapshot_file(const std::string& path, TypeRegistry base);
void save_snapshot_file(const ModelSpace& space, const std::string& path);

}  // namespace gtvm::model
