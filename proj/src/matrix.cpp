#include "lvggm/matrix.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lvggm {

SymmetricMatrix parse_matrix(std::istream& in, const std::string& origin) {
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols)) fail(ErrorKind::Io, origin + ": missing dimension header");
    require(rows == cols && rows >= 0, ErrorKind::Io, origin + ": header must read \"p p\"");
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (!(in >> m(i, j)))
                fail(ErrorKind::Io, origin + ": truncated matrix body at row " + std::to_string(i));
    return SymmetricMatrix(m);
}

void write_matrix(const SymmetricMatrix& m, std::ostream& out) {
    const int p = m.dim();
    out << p << " " << p << "\n";
    char buf[40];
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
}

SymmetricMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Io, "cannot open matrix file: " + path);
    return parse_matrix(in, path);
}

void save_matrix(const SymmetricMatrix& m, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::Io, "cannot write matrix file: " + path);
    write_matrix(m, out);
    out.flush();
    require(out.good(), ErrorKind::Io, "write failed: " + path);
}

} // namespace lvggm
