#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hcmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitOracleMismatch = 3;

/// Runs one subcommand (gen, ingest, train, infer, eval, oracle, report).
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct OracleReport {
  std::size_t checks = 0;
  std::vector<std::string> failures;
};

/// Brute-force cross-checks: DP ordering score vs enumeration, beam search vs
/// exhaustive path search, confidence identity, and oracle-driven inference.
OracleReport run_oracle_checks(std::uint64_t seed, std::size_t n_seeds);

}  // namespace hcmc::cli
