#pragma once

// Canned benchmark jobs: charging extrema at N = 10, power-scaling fits over
// N = 1..30 and the ground-state boundary check, each compared against the
// published reference values.

#include <iosfwd>
#include <string>
#include <vector>

namespace qbattery {

struct Comparison {
  std::string item;
  double reference = 0.0;
  double computed = 0.0;
  double lo = 0.0;  // pass band [lo, hi]
  double hi = 0.0;
  bool gating = true;  // non-gating rows are reported only
  std::string note;

  bool pass() const { return computed >= lo && computed <= hi; }
};

struct OutputFile {
  std::string name;
  std::string contents;
};

struct ReproJob {
  std::string name;
  std::string title;
  std::vector<Comparison> comparisons;
  std::vector<OutputFile> files;
  std::vector<std::string> notes;

  bool passed() const;
};

/// table1 table2 table3 table4 table5 phase
const std::vector<std::string>& reproduce_job_names();

/// Runs the named jobs (all when `only` is empty) in canonical order.
/// Progress goes to `log` when non-null. Throws InvalidArgument on an
/// unknown job name.
std::vector<ReproJob> run_reproduce(const std::vector<std::string>& only, int threads,
                                    std::ostream* log);

std::string render_report(const std::vector<ReproJob>& jobs);

}  // namespace qbattery
