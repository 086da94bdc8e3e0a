#pragma once

#include <random>
#include <string>

#include "fmmkit/io.hpp"

#ifndef FMMKIT_DATA_DIR
#define FMMKIT_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& name) { return std::string(FMMKIT_DATA_DIR) + "/" + name; }

inline fmmkit::FmmTensor bundled(const std::string& name) { return fmmkit::load_tensor(data_path(name)); }

inline fmmkit::RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                            long lo = -9, long hi = 9) {
  std::uniform_int_distribution<long> num(lo, hi), den(1, 5);
  fmmkit::RationalMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = fmmkit::Rational(num(rng), den(rng));
  return m;
}

inline fmmkit::RationalMatrix random_invertible(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    fmmkit::RationalMatrix m = random_matrix(rng, n, n, -2, 2);
    if (fmmkit::matrix_rank(m) == n) return m;
  }
}
