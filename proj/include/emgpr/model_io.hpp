#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "emgpr/errors.hpp"
#include "emgpr/lda.hpp"

namespace emgpr {

// Model file, all integers and doubles little-endian:
//
//   "MYOM"  magic
//   u16     format version (1)
//   u16     d (feature dimension)
//   u16     class count
//   per class:
//     u16   label id
//     u16   name byte length, then UTF-8 name
//     u32   sample count
//     d     f64 mean
//     d*d   f64 covariance, row-major
//   d*d     f64 pooled covariance, row-major
//   f64     ridge actually applied
//
// Write -> read -> write is byte-identical.

inline constexpr char kModelMagic[4] = {'M', 'Y', 'O', 'M'};
inline constexpr std::uint16_t kModelVersion = 1;

namespace detail {

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError(std::string("truncated file while reading ") + what);
  return v;
}

inline void write_string16(std::ostream& out, const std::string& s) {
  if (s.size() > 0xFFFF) throw DataError("name too long for format");
  write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string16(std::istream& in, const char* what) {
  const auto len = read_pod<std::uint16_t>(in, what);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw DataError(std::string("truncated file while reading ") + what);
  return s;
}

inline void write_matrix_rowmajor(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_pod<double>(out, m(r, c));
}

inline Eigen::MatrixXd read_matrix_rowmajor(std::istream& in, int rows, int cols,
                                            const char* what) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = read_pod<double>(in, what);
  return m;
}

}  // namespace detail

inline void save_model(const PooledModel& model, std::ostream& out) {
  out.write(kModelMagic, 4);
  detail::write_pod<std::uint16_t>(out, kModelVersion);
  detail::write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(model.dimension()));
  detail::write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(model.class_count()));
  for (const ClassModel& c : model.classes()) {
    detail::write_pod<std::uint16_t>(out, c.label.id);
    detail::write_string16(out, c.label.name);
    detail::write_pod<std::uint32_t>(out, c.count);
    for (Eigen::Index i = 0; i < c.mean.size(); ++i) detail::write_pod<double>(out, c.mean(i));
    detail::write_matrix_rowmajor(out, c.cov);
  }
  detail::write_matrix_rowmajor(out, model.pooled_cov());
  detail::write_pod<double>(out, model.ridge());
  if (!out) throw DataError("model write failed");
}

inline void save_model(const PooledModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  save_model(model, out);
}

inline PooledModel load_model(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
    throw DataError("not a model file: bad magic");
  const auto version = detail::read_pod<std::uint16_t>(in, "version");
  if (version != kModelVersion)
    throw DataError("unsupported model format version " + std::to_string(version));
  const int d = detail::read_pod<std::uint16_t>(in, "dimension");
  const int nclasses = detail::read_pod<std::uint16_t>(in, "class count");
  if (d < 1 || nclasses < 1) throw DataError("model file: empty dimension or class list");

  std::vector<ClassModel> classes;
  classes.reserve(static_cast<std::size_t>(nclasses));
  for (int k = 0; k < nclasses; ++k) {
    ClassModel c;
    c.label.id = detail::read_pod<std::uint16_t>(in, "label id");
    c.label.name = detail::read_string16(in, "label name");
    c.count = detail::read_pod<std::uint32_t>(in, "class count");
    c.mean.resize(d);
    for (int i = 0; i < d; ++i) c.mean(i) = detail::read_pod<double>(in, "class mean");
    c.cov = detail::read_matrix_rowmajor(in, d, d, "class covariance");
    classes.push_back(std::move(c));
  }
  Eigen::MatrixXd pooled = detail::read_matrix_rowmajor(in, d, d, "pooled covariance");
  const double ridge = detail::read_pod<double>(in, "ridge");
  return assemble_model(std::move(classes), std::move(pooled), ridge);
}

inline PooledModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace emgpr
