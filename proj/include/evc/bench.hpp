#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace evc {

struct BenchRow {
  std::string primitive;  // T_mul, T_exp, T_pair, T_h
  double avg_ms = 0;
  double min_ms = 0;
  double max_ms = 0;
};

struct BenchReport {
  std::size_t iterations = 0;
  std::vector<BenchRow> rows;

  std::string to_csv() const;
  std::string to_markdown() const;
};

constexpr std::size_t kDefaultBenchIterations = 1000;

/// T_mul: group operation in G1; T_exp: G1 scalar multiplication;
/// T_pair: one pairing; T_h: one SHA-256 over 64 bytes.
BenchReport bench_primitives(std::size_t iterations = kDefaultBenchIterations);

}  // namespace evc
