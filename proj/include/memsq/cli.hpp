#pragma once

// Batch driver: config ingestion, mode dispatch, sweeps and file emission.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memsq/core.hpp"
#include "memsq/evolve.hpp"

namespace memsq {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class Mode { Bifurcate, Bounds, Simulate, Quench, Eigen, Sweep };
std::string to_string(Mode mode);

struct SweepAxis {
  std::string parameter;  // lambda, alpha, beta, dim or radius
  std::vector<double> values;
  Mode run = Mode::Quench;  // mode of every sub-run

  bool operator==(const SweepAxis&) const = default;
};

struct RunConfig {
  Mode mode = Mode::Simulate;
  ProblemParams params;
  SchemeConfig scheme;
  std::size_t grid = 140;  // mesh intervals on the half-domain
  double branch_min = 0.3;
  double branch_max = 0.999;
  double branch_step = 0.001;
  std::size_t eigen_samples = 201;
  std::optional<SweepAxis> sweep;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the [mode]/[params]/[scheme]/[sweep] key = value format. Unknown
/// sections or keys, duplicates and bad values raise ConfigError.
RunConfig parse_config(std::string_view text);

/// Canonical key = value text that parses back to an equal RunConfig.
std::string format_config(const RunConfig& config);

/// Text between the config_begin/config_end lines of a manifest.
std::string config_echo(std::string_view manifest);

/// %.17g, with inf/-inf/nan spelled out.
std::string format_number(double value);

struct RunOptions {
  std::filesystem::path out = "out";
  unsigned workers = 0;  // 0 selects the hardware thread count
};

/// Runs one config file. Returns 0 on success, 2 on config errors and 3 on
/// numerical failures; diagnostics go to log.
int run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& log);

/// As run, for config text already in memory.
int run_text(const std::string& text, const RunOptions& options, std::ostream& log);

}  // namespace memsq
