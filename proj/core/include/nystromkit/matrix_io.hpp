#pragma once

#include <iosfwd>
#include <string>

#include "nystromkit/linalg.hpp"

namespace nystromkit {

// Matrix text format: first line "rows cols", then rows lines of cols
// whitespace-separated decimal numbers. Writer emits 17 significant digits.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const Matrix& M);
void write_matrix_file(const std::string& path, const Matrix& M);

}  // namespace nystromkit
