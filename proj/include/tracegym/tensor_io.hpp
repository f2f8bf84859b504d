#pragma once

#include <string>

#include <json.hpp>

#include "tracegym/tensor.hpp"

namespace tracegym {

/// JSON exchange format for dense tensors:
///   {"row_dims": [2,2], "col_dims": [2,2], "re": [...], "im": [...]}
/// with "re"/"im" flat row-major over (row modes..., column modes...).
/// "im" may be omitted for real tensors.
nlohmann::ordered_json tensor_to_json(const DenseTensor& a);
DenseTensor tensor_from_json(const nlohmann::json& j);

DenseTensor load_tensor(const std::string& path);
void save_tensor(const std::string& path, const DenseTensor& a);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

} // namespace tracegym
