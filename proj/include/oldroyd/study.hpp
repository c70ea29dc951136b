#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oldroyd/fe_space.hpp"
#include "oldroyd/memory.hpp"
#include "oldroyd/stepper.hpp"

namespace oldroyd {

enum class StudyKind { Spatial, Temporal, Longtime, Stability };
enum class ElementPair { P2P0, Mini };

StudyKind parse_study_kind(std::string_view s);
ElementPair parse_element_pair(std::string_view s);
std::string_view to_string(StudyKind s);
std::string_view to_string(ElementPair e);

SpaceKind velocity_kind(ElementPair e);
SpaceKind pressure_kind(ElementPair e);

/// Time-step rule: k = (1/n)^2 per level, or an explicit list of steps.
///
/// Text forms: "h2", "sqrt" (the same coupling read as h = sqrt(k)) and
/// "list=k1,k2,...". With a list, the temporal study derives n = 1/sqrt(k)
/// when no levels are given; the other studies use the list as is.
struct TimeStepRule {
  enum class Kind { HSquared, List } kind = Kind::HSquared;
  std::vector<double> steps;

  static TimeStepRule parse(std::string_view text);
};

struct StudyConfig {
  StudyKind study = StudyKind::Spatial;
  int example = 1;
  ElementPair element = ElementPair::P2P0;
  std::vector<int> levels;
  TimeStepRule k_rule;
  std::vector<double> final_times{1.0};
  double mu = 1.0;
  double gamma = 0.1;
  double delta = 0.1;
  SolveControls controls;
  std::string out;

  ModelParams params() const { return ModelParams(mu, gamma, delta); }
  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Error and rate columns per resolution; rates are empty in the first row.
struct RateRow {
  double resolution = 0.0;
  int level = 0;
  double time_step = 0.0;
  double l2_err = 0.0;
  std::optional<double> l2_rate;
  double h1_err = 0.0;
  std::optional<double> h1_rate;
  double p_err = 0.0;
  std::optional<double> p_rate;
};

struct RateTable {
  std::string resolution_label = "h";  // "h" or "k"
  double final_time = 0.0;
  std::vector<RateRow> rows;
};

struct StabilityCell {
  int level = 0;
  double time_step = 0.0;
  double sup_l2 = 0.0;
  double sup_h1 = 0.0;
  double sup_p = 0.0;
  bool ok = false;
  std::string status;
};

struct StabilityTable {
  double final_time = 0.0;
  std::vector<StabilityCell> cells;
};

struct LongtimeResult {
  std::vector<RateTable> tables;  // one per final time
  bool rates_stable = false;      // last-row L2 rates differ by < 0.2 across horizons
  std::vector<double> max_h1_seminorm;  // per level, over the whole run
};

/// rate_i = log(e_{i-1}/e_i) / log(r_{i-1}/r_i), i = 1..n-1.
std::vector<double> compute_rates(const std::vector<double>& errors,
                                  const std::vector<double>& resolutions);

/// Fills the rate columns of a table from its error columns.
void fill_rates(RateTable& table);

/// Levels and time steps of a convergence sweep, in order.
std::vector<std::pair<int, double>> sweep_schedule(const StudyConfig& config);

/// Steps of a stability run: every t_n = n k with 1 <= n and t_n <= T.
/// T need not be a multiple of k here.
int stability_steps(double k, double final_time);

RateTable run_spatial_study(const StudyConfig& config);
RateTable run_temporal_study(const StudyConfig& config);
LongtimeResult run_longtime_study(const StudyConfig& config);
StabilityTable run_stability_study(const StudyConfig& config);

void write_csv(const RateTable& table, std::ostream& os);
void write_csv(const std::vector<RateTable>& tables, std::ostream& os);
void write_csv(const StabilityTable& table, std::ostream& os);
void write_csv(const std::vector<MonitorRecord>& monitors, std::ostream& os);

/// Writes to a file; I/O failures throw std::runtime_error naming the path.
template <typename Table>
void write_csv(const Table& table, const std::filesystem::path& path);

/// Reads a CSV written by write_csv back into rows of cells.
std::vector<std::vector<std::string>> read_csv(std::istream& is);

}  // namespace oldroyd
