#pragma once

#include <ostream>
#include <string>

#include "nlohmann/json.hpp"
#include "sensbound/sweep.hpp"

namespace sensbound {

using ordered_json = nlohmann::ordered_json;

struct OutputSpec {
  enum class Format { table, csv, json };
  Format format = Format::table;
  std::string destination = "-";  // "-" means standard output
  int precision = 6;
};

OutputSpec::Format parse_format(const std::string& name);

/// Shortest representation that round-trips to the same double.
std::string format_shortest(double v);
/// Display form at `precision` significant digits.
std::string format_display(double v, int precision);

std::string to_string(FunctionKind kind);
std::string to_string(Quadrant quadrant);
std::string to_string(RecordStatus status);
std::string to_string(UndefinedRegion region);

/// CSV: header row, comma separator, '.' decimal point, LF endings. Every
/// numeric display column is paired with a full-precision *_raw column.
void write_sweep_csv(std::ostream& os, const SweepResult& result, const DiscreteNetwork& net,
                     int precision);
void write_sweep_table(std::ostream& os, const SweepResult& result, const DiscreteNetwork& net,
                       int precision);
ordered_json sweep_to_json(const SweepResult& result, const DiscreteNetwork& net);

/// Multi-parameter variants for --all-params runs; the CSV gains a leading
/// `parameter` column.
struct LabeledSweep {
  std::string parameter;
  SweepResult result;
};
void write_sweeps_csv(std::ostream& os, std::span<const LabeledSweep> sweeps,
                      const DiscreteNetwork& net, int precision);
void write_sweeps_table(std::ostream& os, std::span<const LabeledSweep> sweeps,
                        const DiscreteNetwork& net, int precision);
ordered_json sweeps_to_json(std::span<const LabeledSweep> sweeps, const DiscreteNetwork& net);

ordered_json verify_to_json(const VerifyReport& report);
void write_verify_table(std::ostream& os, const VerifyReport& report, int precision);

}  // namespace sensbound
