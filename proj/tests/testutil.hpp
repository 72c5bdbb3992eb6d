#pragma once
// Shared fixtures for the test suites: scratch directories, frozen-value
// comparison helpers, and a hand-written sieve cache used by the cache
// format tests.
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "zx/primes.hpp"

namespace zxt {

// Frozen regression pins: tight relative tolerance, loose enough to absorb
// codegen differences (fma contraction, vectorization) between toolchains.
inline doctest::Approx frozen(double v) {
  return doctest::Approx(v).epsilon(1e-11);
}

struct ScratchDir {
  std::filesystem::path path;
  ScratchDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("zxtest_" + std::to_string(rd()) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  REQUIRE(f.good());
  f.write(content.data(), std::streamsize(content.size()));
}

// Cache with sieve limit 15 whose block 1 holds no primes: magic, 8-byte LE
// limit, varint block count, then per block (index, count, prime deltas).
// Exercises both the format contract and the empty-block moment path.
inline std::string crafted_empty_block_cache() {
  std::string out = "ZXLB1";
  out.push_back(char(15));
  for (int i = 0; i < 7; ++i) out.push_back(char(0));
  out.push_back(char(2));  // two blocks
  out.push_back(char(0));  // block 0
  out.push_back(char(1));  // one prime
  out.push_back(char(2));  // delta to 2
  out.push_back(char(1));  // block 1
  out.push_back(char(0));  // no primes
  return out;
}

// Sieve shared within a suite. 2e6 covers blocks 0..2 exactly.
inline const zx::PrimePartition& part2e6() {
  static zx::PrimePartition part = zx::PrimePartition::build(2000000);
  return part;
}

// 6e8 covers block 3 exactly; built once per process on first use.
inline const zx::PrimePartition& part6e8() {
  static zx::PrimePartition part = zx::PrimePartition::build(600000000);
  return part;
}

}  // namespace zxt
