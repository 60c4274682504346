#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace uforge::harness {

struct CheckResult {
  std::string name;
  std::string claim;
  bool passed = false;
  /// Smallest measured slack; negative values are violations.
  double margin = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

inline constexpr std::uint64_t kDefaultVerifySeed = 20240917;

CheckResult check_quadratic_rcd_exact();
CheckResult check_rcd_bound(std::uint64_t seed, int oracles = 50, int K = 500);
CheckResult check_rcd_tail(std::uint64_t seed, int oracles = 50, int K = 500);
CheckResult check_decay_and_pl(std::uint64_t seed, int oracles = 50, int steps = 500);
CheckResult check_spectral_accuracy(std::uint64_t seed, int cases = 24);
CheckResult check_irp_stationary(std::uint64_t seed, long steps = 100000, std::size_t dim = 100);
CheckResult check_alg1_limits(std::uint64_t seed);
CheckResult check_mia_bruteforce(std::uint64_t seed, int cases = 200);
CheckResult check_ieu_monitor(std::uint64_t seed);

/// Every analytic check, in a fixed order. Deterministic given the seed.
VerifyReport verify_suite(std::uint64_t seed = kDefaultVerifySeed);

nlohmann::json to_json(const VerifyReport& r);
std::string format_table(const VerifyReport& r);

/// Reference threshold attack: every candidate evaluated by a full scan.
struct BruteMia {
  double threshold = 0.0;
  double member_rate = 0.0;
};
BruteMia mia_bruteforce(const std::vector<double>& members, const std::vector<double>& nonmembers,
                        const std::vector<double>& probe);

}  // namespace uforge::harness
