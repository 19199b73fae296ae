#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "clarklab/linalg.hpp"
#include "clarklab/matfun.hpp"

namespace clarklab {

using json = nlohmann::json;

// Complex numbers are either a bare number or a [re, im] pair. Matrices are
// arrays of rows; a bare scalar is accepted for 1x1. Errors carry a JSON
// pointer to the offending field.
cplx parse_complex(const json& j, const std::string& pointer);
Mat parse_matrix(const json& j, const std::string& pointer, int dim = -1);
Vec parse_vector(const json& j, const std::string& pointer, int dim = -1);

json complex_to_json(cplx z);
json matrix_to_json(const Mat& m);
json vector_to_json(const Vec& v);

MatFunction parse_matfunction(const json& j);
json to_json(const MatFunction& theta);

json read_json_file(const std::filesystem::path& path);
MatFunction load_matfunction(const std::filesystem::path& path);
// File holding either a bare matrix or {"matrix": ...}.
Mat load_matrix(const std::filesystem::path& path, int dim = -1);

}  // namespace clarklab
