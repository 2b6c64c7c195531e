#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace maser {

inline constexpr const char* kVersion = "1.0.0";

// lo:hi:steps on the command line; steps >= 2, lo < hi.
struct SweepSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t steps = 0;
  bool operator==(const SweepSpec&) const = default;
};

using ParamValue = std::variant<double, SweepSpec>;

enum class Command {
  distribution,
  potential,
  branches,
  phase_diagram,
  corrlength,
  autocorr,
  twinkle,
};

enum class OutputFormat { csv, json };

struct RunConfig {
  Command command = Command::distribution;
  ParamValue N{100.0};
  ParamValue a{1.0};
  ParamValue nb{0.0};
  ParamValue delta{0.0};
  ParamValue theta{1.0};
  std::optional<std::int64_t> nmax;  // truncation override
  std::optional<double> tol;         // dominant tolerance of the command
  double xmax = 1.0;                 // potential: x grid end
  int xsteps = 400;                  //            and node count
  double tmax = 20.0;                // autocorr: time grid end
  int tsteps = 200;                  //           and node count
  std::string out;                   // empty = stdout
  OutputFormat format = OutputFormat::csv;
  int jobs = 0;  // 0 = MASERPHASE_JOBS env or all hardware threads

  bool operator==(const RunConfig&) const = default;
};

// Rendered result table.  Cells are final strings (numbers at 17 significant
// digits) so CSV and JSON mirror each other byte for byte in the data part.
struct OutputTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;  // ordered
};

// argv without the program name.  Returns nullopt when help was requested
// (help_text is then filled).  Bad flags raise UsageError.
std::optional<RunConfig> parse_config(const std::vector<std::string>& args,
                                      std::string& help_text);

// Round-trip of the resolved config through the metadata block.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);

// Executes the configured command.  Sweep points run independently (up to
// `jobs` at a time) and rows come back ordered by sweep index; a failing
// point keeps its row, with the reason in the `error` column.  Errors in
// scalar commands propagate to the caller.
OutputTable run(const RunConfig& config);

void write_table(std::ostream& os, const OutputTable& table, OutputFormat format);

// Full command-line behavior: parse, run, write, map errors to exit codes
// (0 ok, 1 usage, 2 numerical failure in a scalar command).
int cli_main(int argc, const char* const* argv);

std::string format_g17(double v);  // 17-significant-digit rendering

}  // namespace maser
