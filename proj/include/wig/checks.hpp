#pragma once

#include <string>
#include <vector>

#include "wig/io.hpp"

namespace wig {

// One measured quantity against its threshold. `upper` means value <= threshold
// passes; otherwise value >= threshold passes. Rows with `expect_fail` are
// controls whose verdict must be negative.
struct CheckRow {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool upper = true;
  bool pass = false;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckRow> rows;
  double seconds = 0;
  bool pass() const;
  std::string csv() const;  // header plus one line per row
};

const std::vector<std::string>& suite_names();
// Throws UnknownSuite for names outside suite_names().
SuiteResult run_suite(const std::string& name, const RunConfig& cfg = {});

SuiteResult suite_moyal(const RunConfig& cfg);
SuiteResult suite_symplectic(const RunConfig& cfg);
SuiteResult suite_intertwine(const RunConfig& cfg);
SuiteResult suite_fio(const RunConfig& cfg);
SuiteResult suite_propagator(const RunConfig& cfg);
SuiteResult suite_normequiv(const RunConfig& cfg);
SuiteResult suite_perf(const RunConfig& cfg);

// Peak resident set of this process in bytes (VmHWM), 0 if unavailable.
std::size_t peak_rss_bytes();
// Resets the peak counter where the kernel allows it; returns false otherwise.
bool reset_peak_rss();

}  // namespace wig
