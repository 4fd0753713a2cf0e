#include "nystromkit/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nystromkit {

Matrix read_matrix(std::istream& in) {
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty matrix file", 1);
    ++lineno;
    std::istringstream header(line);
    long rows = -1, cols = -1;
    if (!(header >> rows >> cols) || rows < 0 || cols < 0)
        throw ParseError("expected header 'rows cols'", lineno);
    Matrix M(rows, cols);
    for (long i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno + 1);
        ++lineno;
        std::istringstream row(line);
        for (long j = 0; j < cols; ++j) {
            if (!(row >> M(i, j)))
                throw ParseError("expected " + std::to_string(cols) + " numbers", lineno);
        }
        double extra;
        if (row >> extra) throw ParseError("trailing data in row", lineno);
    }
    return M;
}

Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& M) {
    out << M.rows() << ' ' << M.cols() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ' ';
            out << M(i, j);
        }
        out << '\n';
    }
}

void write_matrix_file(const std::string& path, const Matrix& M) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    write_matrix(out, M);
}

}  // namespace nystromkit
