#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "wavecrest/detector.hpp"
#include "wavecrest/tracer.hpp"

namespace wavecrest {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr std::string_view kToolVersion = "1.0.0";

struct SimulateOptions {
  std::optional<int> substeps;
  std::optional<double> sample_rate;
};

/// Everything a simulate run writes, as text.
struct RunOutputs {
  std::string events_csv;
  std::string worldlines_csv;
  std::string segments_csv;
  std::string trace_csv;
  std::string report_csv;
  InterferenceReport report;
};

RunOutputs render_outputs(const SimulationResult& result);

std::string events_csv(const SimulationResult& result);
std::string worldlines_csv(const SimulationResult& result);
std::string segments_csv(const SimulationResult& result);
std::string trace_csv(const DetectorTrace& trace);
std::string report_csv(const InterferenceReport& report);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
                 const SimulateOptions& opts, std::ostream& log);

/// Closed-form checks as a pass/fail table.
int cmd_check(std::ostream& out);

/// range is "start:stop:count"; values are evenly spaced, inclusive.
int cmd_sweep(const std::filesystem::path& scenario, std::string_view param, std::string_view range,
              const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace wavecrest
