// qsr-dg command-line harness: simulate, balance, convergence, checks.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsr_dg {

enum ExitCode : int {
  kExitOk = 0,
  kExitGateFailed = 1,
  kExitBadArguments = 2,
  kExitIntegrationFailed = 3,
  kExitGridsDoNotNest = 4,
};

/// Runs the tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase scientific notation with 17 significant digits.
std::string format_number(double x);

/// Parsed CSV table: header names and numeric rows. Empty cells read as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace qsr_dg
