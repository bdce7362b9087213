#pragma once

#include <string>

#include "qmm/matrix.hpp"

namespace qmm {

// Binary matrix container "QMX1": magic `QMX1`, u32 LE rows, u32 LE cols,
// then rows*cols float64 LE row-major.
void write_qmx(const std::string& path, const Matrix& m);
Matrix read_qmx(const std::string& path);

// Header-free comma-separated decimal.
void write_csv(const std::string& path, const Matrix& m);
Matrix read_csv(const std::string& path);

}  // namespace qmm
