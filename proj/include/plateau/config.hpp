#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plateau/domain.hpp"
#include "plateau/minimality.hpp"

namespace plateau {

struct ConfigIssue {
  int line = 0;
  int column = 0;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct CaseConfig {
  double t_bar = 0.0;
  std::string gamma1_src, gamma2_src, phi1_src, phi2_src;
  ScalarFn1D gamma1, gamma2, phi1, phi2;

  int n_s = 257;
  int n_y = 129;
  int n_t = 129;
  int n_h = 65;
  int gauss = 2;
  double tol = 0.0;  // 0 = 1e-12·(1 + t̄)
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned workers = 0;

  int zeta_grid = 4097;
  double lip_safety = 1.0;

  int bumps = 20;
  std::vector<double> eps{1e-3, 1e-2};
  std::vector<double> ladder{1e-2, 5e-3, 2.5e-3};
  std::optional<BumpSpec> stationarity_bump;
  std::vector<int> refine{65, 129, 257};

  double probe_y0 = 0.0;
  std::optional<double> probe_t0;  // default t̄/2
  std::optional<double> probe_r;   // default t̄/4
  std::vector<double> probe_rho{0.1, 0.05, 0.025};

  void set_grid(int n) { n_s = n_y = n_t = n; }
  PlateauProblem problem() const;
};

// `key = value` lines, `#` starts a comment. Function values use
// poly(c0, c1, ..., cn) or samples(file.csv); sample paths are resolved
// against base_dir. All issues found are reported together.
CaseConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
CaseConfig load_config(const std::filesystem::path& path);

// Parses a two-column `t,value` CSV with strictly increasing t and no header.
ScalarFn1D load_samples(const std::filesystem::path& path, double t_bar);

}  // namespace plateau
