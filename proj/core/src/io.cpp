#include "qmm/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmm {
namespace {

constexpr char kMagic[4] = {'Q', 'M', 'X', '1'};

static_assert(std::endian::native == std::endian::little,
              "QMX writer assumes a little-endian host");

void write_u32(std::ofstream& f, std::uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::ifstream& f) {
  std::uint32_t v = 0;
  f.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void write_qmx(const std::string& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_qmx: cannot open " + path);
  f.write(kMagic, 4);
  write_u32(f, static_cast<std::uint32_t>(m.rows()));
  write_u32(f, static_cast<std::uint32_t>(m.cols()));
  f.write(reinterpret_cast<const char*>(m.data().data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write_qmx: write failed for " + path);
}

Matrix read_qmx(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_qmx: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_qmx: bad magic in " + path);
  std::uint32_t rows = read_u32(f);
  std::uint32_t cols = read_u32(f);
  if (!f) throw std::runtime_error("read_qmx: truncated header in " + path);
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  f.read(reinterpret_cast<char*>(data.data()),
         static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!f) throw std::runtime_error("read_qmx: truncated payload in " + path);
  return Matrix::from_rows(rows, cols, std::move(data));
}

void write_csv(const std::string& path, const Matrix& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  f.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << m(i, j);
    }
    f << '\n';
  }
}

Matrix read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_csv: cannot open " + path);
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(std::stod(cell));
      ++c;
    }
    if (rows == 0) {
      cols = c;
    } else if (c != cols) {
      throw std::runtime_error("read_csv: ragged rows in " + path);
    }
    ++rows;
  }
  return Matrix::from_rows(rows, cols, std::move(data));
}

}  // namespace qmm
