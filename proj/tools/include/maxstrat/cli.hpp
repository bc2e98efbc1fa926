#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "maxstrat/engine.hpp"

namespace maxstrat::cli {

enum ExitCode : int { kOk = 0, kError = 1, kOracleMismatch = 2 };

/// `args` excludes the program name.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct BenchRow {
  std::string family;
  std::size_t size = 0;
  char variant = 'g';
  std::size_t bools = 0;
  std::size_t choices = 0;
  std::size_t rows = 0;
  EngineStats stats;
  std::string invariant_hash;
};

inline constexpr const char* kBenchHeader =
    "family,size,variant,n,d,l,wall_ms,smt_checks,sat_enumerations,lp_unknowns,iterations,"
    "invariant_hash";

std::string csv_line(const BenchRow& row);

/// One run per (size, variant), ordered by size then variant; `jobs` workers.
std::vector<BenchRow> run_bench(const std::string& family, std::size_t size_lo,
                                std::size_t size_hi, const std::string& variants,
                                const EngineConfig& base, std::size_t jobs);

}  // namespace maxstrat::cli
