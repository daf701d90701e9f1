#include "evc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>

#include "evc/errors.hpp"
#include "evc/group.hpp"
#include "evc/hash.hpp"
#include "evc/rng.hpp"

namespace evc {

namespace {

template <class Setup, class Op>
BenchRow time_op(const char* name, std::size_t iterations, Setup setup, Op op) {
  using clock = std::chrono::steady_clock;
  BenchRow row{name, 0, std::numeric_limits<double>::max(), 0};
  double total = 0;
  for (std::size_t i = 0; i < iterations; ++i) {
    auto input = setup(i);
    auto start = clock::now();
    auto out = op(input);
    auto stop = clock::now();
    asm volatile("" : : "r"(&out) : "memory");
    double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    total += ms;
    row.min_ms = std::min(row.min_ms, ms);
    row.max_ms = std::max(row.max_ms, ms);
  }
  row.avg_ms = total / static_cast<double>(iterations);
  // Guard against floating rounding putting avg a hair outside [min, max].
  row.avg_ms = std::clamp(row.avg_ms, row.min_ms, row.max_ms);
  return row;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

BenchReport bench_primitives(std::size_t iterations) {
  if (iterations == 0) throw Error(ErrorKind::Parameter, "iterations must be >= 1");
  Rng rng = Rng::from_string("bench");
  constexpr std::size_t kPool = 16;
  std::vector<Scalar> scalars;
  std::vector<G1Point> g1s;
  std::vector<G2Point> g2s;
  std::vector<Bytes> blobs;
  for (std::size_t i = 0; i < kPool; ++i) {
    scalars.push_back(Scalar::random(rng));
    g1s.push_back(scalars.back() * G1Point::generator());
    g2s.push_back(Scalar::random(rng) * G2Point::generator());
    blobs.push_back(rng.bytes(64));
  }

  BenchReport report;
  report.iterations = iterations;
  report.rows.push_back(time_op(
      "T_mul", iterations, [&](std::size_t i) { return std::pair(g1s[i % kPool], g1s[(i + 1) % kPool]); },
      [](const auto& in) { return in.first + in.second; }));
  report.rows.push_back(time_op(
      "T_exp", iterations, [&](std::size_t i) { return std::pair(scalars[i % kPool], g1s[(i + 3) % kPool]); },
      [](const auto& in) { return in.first * in.second; }));
  report.rows.push_back(time_op(
      "T_pair", iterations, [&](std::size_t i) { return std::pair(g1s[i % kPool], g2s[(i + 5) % kPool]); },
      [](const auto& in) { return pair(in.first, in.second); }));
  report.rows.push_back(time_op(
      "T_h", iterations, [&](std::size_t i) { return view(blobs[i % kPool]); },
      [](ByteView in) { return sha256(in); }));
  return report;
}

std::string BenchReport::to_csv() const {
  std::string out = "primitive,avg_ms,min_ms,max_ms\n";
  for (const auto& r : rows) out += r.primitive + "," + fmt(r.avg_ms) + "," + fmt(r.min_ms) + "," + fmt(r.max_ms) + "\n";
  return out;
}

std::string BenchReport::to_markdown() const {
  std::string out = "| primitive | avg_ms | min_ms | max_ms |\n|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.primitive + " | " + fmt(r.avg_ms) + " | " + fmt(r.min_ms) + " | " + fmt(r.max_ms) + " |\n";
  }
  out += "\n" + std::to_string(iterations) + " iterations per primitive\n";
  return out;
}

}  // namespace evc
