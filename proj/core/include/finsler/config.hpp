#pragma once

#include "finsler/distance.hpp"
#include "finsler/error.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/sobolev.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace finsler {

struct ConfigIssue {
  int line = 0;  ///< 1-based; 0 when the issue is not tied to a line
  std::string message;
};

/// Every problem found in a config document, not just the first.
class ConfigError : public ArgumentError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  [[nodiscard]] const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct MetricConfig {
  std::string kind;
  int dim = 2;
  std::optional<Vec> b;
  std::optional<Mat> a;
  double epsilon = 0.1;
  std::optional<Vec> lambda;
  double lambda0 = 0.0;
  bool reversed = false;
};

struct DomainConfig {
  std::string kind = "box";
  std::optional<std::vector<double>> bounds;
  double radius = 0.9;
};

/// A validated run description. `echo` holds every effective key = value pair (explicit
/// and defaulted) in a fixed order, enough to reproduce the run.
struct RunConfig {
  std::string experiment;
  MetricConfig metric;
  DomainConfig domain;
  int fiber_nodes = 64;
  int base_resolution = 128;
  SobolevSpec sobolev;
  std::string field = "gaussian";
  DistanceProvider distance;
  int density_jmax = 8;
  std::optional<Vec> density_center;
  std::vector<double> mollify_eps{0.5, 0.25, 0.125};
  std::optional<Vec> geodesic_x;
  std::optional<Vec> geodesic_v;
  double geodesic_T = 2.0;
  int geodesic_steps = 200;
  int geodesic_stride = 10;
  std::vector<double> fiber_decay_L{1.0, 2.0, 5.0, 10.0};
  double sharpness_p = 2.0;
  std::vector<double> sharpness_widths{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int sharpness_resolution = 400;
  int dirichlet_n = 1024;
  std::string dirichlet_f = "cos1";
  std::vector<double> dirichlet_eps{0.5, 0.25, 0.125, 0.0625, 0.03125};
  int check_samples = 200;
  std::string output;

  std::vector<std::pair<std::string, std::string>> echo;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"norm",      "density",   "mollify", "geodesic",
                                              "fiber-decay", "sharpness", "dirichlet", "check"};
  return names;
}

/// Parses a flat `key = value` document with `#` comments. Throws ConfigError listing
/// unknown keys, duplicates, malformed or out-of-range values and missing keys.
RunConfig parse_config(const std::string& text);

FinslerMetric build_metric(const RunConfig& config);
/// Domain of the norm/density/mollify experiments; defaults to a box [-6, 6]^n
/// ([-0.9, 0.9]^n for Funk).
Domain build_domain(const RunConfig& config);
FiberQuadrature build_fiber_rule(const RunConfig& config);

}  // namespace finsler
