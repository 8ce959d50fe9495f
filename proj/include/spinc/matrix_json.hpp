#pragma once

#include <json.hpp>

#include "spinc/linalg.hpp"

namespace spinc {

// Shared debug/interchange format: a JSON array of rows, each row an array
// of [re, im] pairs.
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

// Rounds to a fixed number of significant digits so reports are stable text.
double fixed_precision(double x, int digits = 6);

}  // namespace spinc
