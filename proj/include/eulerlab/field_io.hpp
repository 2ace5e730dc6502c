#pragma once

#include <string>

#include "json.hpp"

#include "eulerlab/grid.hpp"
#include "eulerlab/mask.hpp"

namespace eulerlab {

/// Field file format:
///   { "grid": {"x0","y0","h","nx","ny"}, "kind": "scalar"|"vector",
///     "data": [row-major values; vectors interleaved ux,uy] }
/// Mask files are scalar field files holding the mask's level function
/// (inside <=> value > 0) with an extra "role": "mask".
nlohmann::json grid_to_json(const Grid2& g);
Grid2 grid_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScalarField& f);
nlohmann::json to_json(const VectorField2& u);
ScalarField scalar_from_json(const nlohmann::json& j);
VectorField2 vector_from_json(const nlohmann::json& j);
nlohmann::json mask_to_json(const DomainMask& m);
DomainMask mask_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::string& path);
/// Writes to a sibling temporary file, then renames over the target.
void write_text_atomic(const std::string& path, const std::string& text);
void write_json_atomic(const std::string& path, const nlohmann::json& j);

inline ScalarField read_scalar_field(const std::string& path) { return scalar_from_json(read_json(path)); }
inline VectorField2 read_vector_field(const std::string& path) { return vector_from_json(read_json(path)); }
inline DomainMask read_mask(const std::string& path) { return mask_from_json(read_json(path)); }

}  // namespace eulerlab
