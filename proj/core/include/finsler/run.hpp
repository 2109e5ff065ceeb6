#pragma once

#include "finsler/approximation.hpp"
#include "finsler/config.hpp"

#include <iosfwd>
#include <string>

namespace finsler {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Result table of one experiment plus the line-one metadata summary.
struct RunReport {
  ConvergenceTable table;
  double wall_seconds = 0.0;
  /// Roundoff floor of the reported numbers: DBL_EPSILON * sqrt(nodes) * max |value|.
  double quadrature_floor = 0.0;
  std::size_t nodes = 0;
};

/// Runs the configured experiment. Module errors propagate.
RunReport execute(const RunConfig& config);

/// CSV text: `#` metadata lines (summary, table metadata, config echo), header, rows.
/// Numbers use the shortest round-trip representation; LF line endings.
std::string render_csv(const RunReport& report, const RunConfig& config);

/// JSON sidecar with config echo, wall time, quadrature floor and columns.
std::string render_json(const RunReport& report, const RunConfig& config);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

/// Parses, executes and writes `out_path` (CSV) plus `out_path`.json. The path falls back
/// to the config's `output` key, then to `<experiment>.csv`. Returns 0 on
/// success, 2 on configuration errors, 3 on numerical failures; diagnostics go to
/// `log`. Nothing is written on errors, except that a failing `check` run still writes
/// its table before returning 3.
int run(const std::string& config_text, const std::string& out_path, std::ostream& log);

}  // namespace finsler
