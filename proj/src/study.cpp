#include "oldroyd/study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "oldroyd/manufactured.hpp"
#include "oldroyd/mesh.hpp"

namespace oldroyd {

StudyKind parse_study_kind(std::string_view s) {
  if (s == "spatial") return StudyKind::Spatial;
  if (s == "temporal") return StudyKind::Temporal;
  if (s == "longtime") return StudyKind::Longtime;
  if (s == "stability") return StudyKind::Stability;
  throw std::invalid_argument("unknown study '" + std::string(s) + "'");
}

ElementPair parse_element_pair(std::string_view s) {
  if (s == "p2p0") return ElementPair::P2P0;
  if (s == "mini") return ElementPair::Mini;
  throw std::invalid_argument("unknown element '" + std::string(s) + "' (p2p0 | mini)");
}

std::string_view to_string(StudyKind s) {
  switch (s) {
    case StudyKind::Spatial: return "spatial";
    case StudyKind::Temporal: return "temporal";
    case StudyKind::Longtime: return "longtime";
    case StudyKind::Stability: return "stability";
  }
  return "?";
}

std::string_view to_string(ElementPair e) { return e == ElementPair::P2P0 ? "p2p0" : "mini"; }

SpaceKind velocity_kind(ElementPair e) {
  return e == ElementPair::P2P0 ? SpaceKind::VelocityP2 : SpaceKind::VelocityMini;
}

SpaceKind pressure_kind(ElementPair e) {
  return e == ElementPair::P2P0 ? SpaceKind::PressureP0 : SpaceKind::PressureP1;
}

namespace {

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

TimeStepRule TimeStepRule::parse(std::string_view text) {
  TimeStepRule rule;
  if (text == "h2" || text == "sqrt") return rule;
  constexpr std::string_view prefix = "list=";
  if (text.substr(0, prefix.size()) != prefix) {
    throw std::invalid_argument("unknown k-rule '" + std::string(text) +
                                "' (h2 | sqrt | list=k1,k2,...)");
  }
  rule.kind = Kind::List;
  std::string_view rest = text.substr(prefix.size());
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    // Accept fractions such as 1/16.
    const auto slash = item.find('/');
    double k = slash == std::string_view::npos
                   ? parse_double(item)
                   : parse_double(item.substr(0, slash)) / parse_double(item.substr(slash + 1));
    rule.steps.push_back(k);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (rule.steps.empty()) throw std::invalid_argument("k-rule list is empty");
  return rule;
}

std::vector<std::pair<int, double>> sweep_schedule(const StudyConfig& config) {
  std::vector<std::pair<int, double>> out;
  const auto& ks = config.k_rule.steps;
  if (config.k_rule.kind == TimeStepRule::Kind::HSquared) {
    for (int n : config.levels) out.emplace_back(n, 1.0 / (static_cast<double>(n) * n));
    return out;
  }
  if (config.study == StudyKind::Temporal && config.levels.empty()) {
    for (double k : ks) {
      const double n = std::round(1.0 / std::sqrt(k));
      if (n < 1.0 || std::abs(n * n * k - 1.0) > 1e-9) {
        throw std::invalid_argument("temporal study: 1/sqrt(k) is not an integer for k=" +
                                    std::to_string(k));
      }
      out.emplace_back(static_cast<int>(n), k);
    }
    return out;
  }
  if (ks.size() == 1) {
    for (int n : config.levels) out.emplace_back(n, ks.front());
    return out;
  }
  if (ks.size() != config.levels.size()) {
    throw std::invalid_argument("k list has " + std::to_string(ks.size()) +
                                " entries but there are " + std::to_string(config.levels.size()) +
                                " levels");
  }
  for (std::size_t i = 0; i < ks.size(); ++i) out.emplace_back(config.levels[i], ks[i]);
  return out;
}

void StudyConfig::validate() const {
  if (example != 1 && example != 2) {
    throw std::invalid_argument("example must be 1 or 2");
  }
  (void)params();
  controls.validate();
  if (final_times.empty()) throw std::invalid_argument("empty final-time list");
  for (double t : final_times) {
    if (!(t > 0.0)) throw std::invalid_argument("final time must be positive");
  }
  if (study != StudyKind::Longtime && final_times.size() != 1) {
    throw std::invalid_argument("only the longtime study accepts several final times");
  }
  if (study == StudyKind::Longtime) {
    for (std::size_t i = 1; i < final_times.size(); ++i) {
      if (!(final_times[i] > final_times[i - 1])) {
        throw std::invalid_argument("final times must be strictly increasing");
      }
    }
  }
  const bool derived_levels = study == StudyKind::Temporal &&
                              k_rule.kind == TimeStepRule::Kind::List && levels.empty();
  if (levels.empty() && !derived_levels) throw std::invalid_argument("empty level list");
  for (int n : levels) {
    if (n < 1) throw std::invalid_argument("mesh levels must be >= 1");
  }
  for (double k : k_rule.steps) {
    if (!(k > 0.0)) throw std::invalid_argument("time steps must be positive");
  }
  if (study == StudyKind::Stability) {
    if (k_rule.kind != TimeStepRule::Kind::List) {
      throw std::invalid_argument("stability study needs --k-rule list=...");
    }
    for (double k : k_rule.steps) {
      if (stability_steps(k, final_times.front()) < 1) {
        throw std::invalid_argument("stability study: k=" + std::to_string(k) +
                                    " exceeds the final time");
      }
    }
    return;
  }
  if (study == StudyKind::Spatial || study == StudyKind::Longtime) {
    for (std::size_t i = 1; i < levels.size(); ++i) {
      if (levels[i] <= levels[i - 1]) {
        throw std::invalid_argument("mesh levels must be strictly increasing");
      }
    }
  }
  const auto schedule = sweep_schedule(*this);
  if (study == StudyKind::Temporal) {
    for (std::size_t i = 1; i < schedule.size(); ++i) {
      if (!(schedule[i].second < schedule[i - 1].second)) {
        throw std::invalid_argument("temporal study: time steps must be strictly decreasing");
      }
    }
  }
  for (const auto& [n, k] : schedule) {
    for (double t : final_times) (void)step_count(k, t);
  }
}

int stability_steps(double k, double final_time) {
  if (!(k > 0.0) || !(final_time > 0.0)) {
    throw std::invalid_argument("stability_steps: need k > 0 and T > 0");
  }
  return static_cast<int>(std::floor(final_time / k + 1e-9));
}

std::vector<double> compute_rates(const std::vector<double>& errors,
                                  const std::vector<double>& resolutions) {
  if (errors.size() != resolutions.size()) {
    throw std::invalid_argument("compute_rates: size mismatch");
  }
  for (double e : errors) {
    if (!(e > 0.0)) throw std::invalid_argument("compute_rates: errors must be positive");
  }
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (!(resolutions[i] > 0.0)) {
      throw std::invalid_argument("compute_rates: resolutions must be positive");
    }
    if (i > 0 && (resolutions[i] == resolutions[i - 1] ||
                  (i > 1 && (resolutions[i] < resolutions[i - 1]) !=
                                (resolutions[i - 1] < resolutions[i - 2])))) {
      throw std::invalid_argument("compute_rates: resolutions must be strictly monotone");
    }
  }
  std::vector<double> rates;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    rates.push_back(std::log(errors[i - 1] / errors[i]) /
                    std::log(resolutions[i - 1] / resolutions[i]));
  }
  return rates;
}

void fill_rates(RateTable& table) {
  std::vector<double> r, l2, h1, p;
  for (const RateRow& row : table.rows) {
    r.push_back(row.resolution);
    l2.push_back(row.l2_err);
    h1.push_back(row.h1_err);
    p.push_back(row.p_err);
  }
  const auto fill = [&](const std::vector<double>& e, std::optional<double> RateRow::*member) {
    // Columns with a zero error (exact solves) carry no rate.
    if (std::any_of(e.begin(), e.end(), [](double v) { return !(v > 0.0); })) return;
    const auto rates = compute_rates(e, r);
    for (std::size_t i = 0; i < rates.size(); ++i) table.rows[i + 1].*member = rates[i];
  };
  fill(l2, &RateRow::l2_rate);
  fill(h1, &RateRow::h1_rate);
  fill(p, &RateRow::p_rate);
}

namespace {

struct LevelRun {
  std::vector<ErrorNorms> errors;  // one per horizon
  double max_h1_seminorm = 0.0;
};

// Runs one level to the last horizon, sampling the errors at every horizon.
LevelRun solve_level(const StudyConfig& config, int n, double k,
                     const std::vector<double>& horizons) {
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(n));
  const FeSpace velocity = build_space(mesh, velocity_kind(config.element));
  const FeSpace pressure = build_space(mesh, pressure_kind(config.element));
  const ModelParams params = config.params();
  const ManufacturedCase exact = make_case(config.example);
  const ErrorEvaluator errors(velocity, pressure);

  std::vector<int> sample_steps;
  for (double t : horizons) sample_steps.push_back(step_count(k, t));

  LevelRun out;
  out.errors.resize(horizons.size());
  const auto observer = [&](const BackwardEulerStepper&, const StepperState& s) {
    for (std::size_t i = 0; i < sample_steps.size(); ++i) {
      if (s.n == sample_steps[i]) out.errors[i] = errors(s.velocity, s.pressure, exact, s.t);
    }
  };
  try {
    const RunResult r = run(velocity, pressure, params, manufactured_problem(exact, params), k,
                            horizons.back(), config.controls, observer);
    out.max_h1_seminorm = r.max_h1_seminorm;
  } catch (const std::exception& e) {
    throw std::runtime_error("level n=" + std::to_string(n) + " (k=" + std::to_string(k) +
                             "): " + e.what());
  }
  return out;
}

RateTable sweep(const StudyConfig& config, bool index_by_k) {
  config.validate();
  RateTable table;
  table.resolution_label = index_by_k ? "k" : "h";
  table.final_time = config.final_times.front();
  for (const auto& [n, k] : sweep_schedule(config)) {
    const LevelRun run = solve_level(config, n, k, {table.final_time});
    RateRow row;
    row.level = n;
    row.time_step = k;
    row.resolution = index_by_k ? k : 1.0 / n;
    row.l2_err = run.errors[0].velocity_l2;
    row.h1_err = run.errors[0].velocity_h1;
    row.p_err = run.errors[0].pressure_l2;
    table.rows.push_back(row);
  }
  fill_rates(table);
  return table;
}

}  // namespace

RateTable run_spatial_study(const StudyConfig& config) {
  if (config.study != StudyKind::Spatial) throw std::invalid_argument("not a spatial study");
  return sweep(config, false);
}

RateTable run_temporal_study(const StudyConfig& config) {
  if (config.study != StudyKind::Temporal) throw std::invalid_argument("not a temporal study");
  return sweep(config, true);
}

LongtimeResult run_longtime_study(const StudyConfig& config) {
  if (config.study != StudyKind::Longtime) throw std::invalid_argument("not a longtime study");
  config.validate();
  LongtimeResult result;
  for (double t : config.final_times) {
    RateTable table;
    table.final_time = t;
    result.tables.push_back(table);
  }
  for (const auto& [n, k] : sweep_schedule(config)) {
    const LevelRun run = solve_level(config, n, k, config.final_times);
    result.max_h1_seminorm.push_back(run.max_h1_seminorm);
    for (std::size_t i = 0; i < config.final_times.size(); ++i) {
      RateRow row;
      row.level = n;
      row.time_step = k;
      row.resolution = 1.0 / n;
      row.l2_err = run.errors[i].velocity_l2;
      row.h1_err = run.errors[i].velocity_h1;
      row.p_err = run.errors[i].pressure_l2;
      result.tables[i].rows.push_back(row);
    }
  }
  double lo = INFINITY;
  double hi = -INFINITY;
  for (RateTable& table : result.tables) {
    fill_rates(table);
    const auto& last = table.rows.back().l2_rate;
    if (last) {
      lo = std::min(lo, *last);
      hi = std::max(hi, *last);
    }
  }
  result.rates_stable = hi >= lo && hi - lo < 0.2;
  return result;
}

StabilityTable run_stability_study(const StudyConfig& config) {
  if (config.study != StudyKind::Stability) throw std::invalid_argument("not a stability study");
  config.validate();
  StabilityTable table;
  table.final_time = config.final_times.front();
  const ModelParams params = config.params();
  const ManufacturedCase exact = make_case(config.example);
  for (int n : config.levels) {
    const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(n));
    const FeSpace velocity = build_space(mesh, velocity_kind(config.element));
    const FeSpace pressure = build_space(mesh, pressure_kind(config.element));
    for (double k : config.k_rule.steps) {
      StabilityCell cell;
      cell.level = n;
      cell.time_step = k;
      // Sups over the computed levels t_1..t_N; the projected U^0 is data.
      const auto observer = [&cell](const BackwardEulerStepper& s, const StepperState& st) {
        if (st.n == 0) return;
        const double l2 = s.l2_norm(st.velocity);
        const double g = s.h1_seminorm(st.velocity);
        cell.sup_l2 = std::max(cell.sup_l2, l2);
        cell.sup_h1 = std::max(cell.sup_h1, std::sqrt(l2 * l2 + g * g));
        cell.sup_p = std::max(cell.sup_p, s.pressure_l2_norm(st.pressure));
      };
      try {
        const int steps = stability_steps(k, table.final_time);
        run(velocity, pressure, params, manufactured_problem(exact, params), k, steps * k,
            config.controls, observer);
        cell.ok = std::isfinite(cell.sup_l2) && std::isfinite(cell.sup_h1) &&
                  std::isfinite(cell.sup_p);
        cell.status = cell.ok ? "ok" : "non-finite";
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.status = e.what();
      }
      table.cells.push_back(cell);
    }
  }
  return table;
}

namespace {

std::string format_error(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::string format_rate(const std::optional<double>& r) {
  if (!r) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", *r);
  return buf;
}

std::string format_plain(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void write_rows(const RateTable& table, std::ostream& os, bool with_time) {
  for (const RateRow& r : table.rows) {
    if (with_time) os << format_plain(table.final_time) << ',';
    os << format_plain(r.resolution) << ',' << format_error(r.l2_err) << ','
       << format_rate(r.l2_rate) << ',' << format_error(r.h1_err) << ','
       << format_rate(r.h1_rate) << ',' << format_error(r.p_err) << ','
       << format_rate(r.p_rate) << '\n';
  }
}

constexpr const char* kRateColumns = "l2_err,l2_rate,h1_err,h1_rate,p_err,p_rate";

}  // namespace

void write_csv(const RateTable& table, std::ostream& os) {
  os << table.resolution_label << ',' << kRateColumns << '\n';
  write_rows(table, os, false);
}

void write_csv(const std::vector<RateTable>& tables, std::ostream& os) {
  os << "T,h," << kRateColumns << '\n';
  for (const RateTable& t : tables) write_rows(t, os, true);
}

void write_csv(const StabilityTable& table, std::ostream& os) {
  os << "h,k,sup_l2,sup_h1,sup_p,status\n";
  for (const StabilityCell& c : table.cells) {
    os << format_plain(1.0 / c.level) << ',' << format_plain(c.time_step) << ','
       << format_error(c.sup_l2) << ',' << format_error(c.sup_h1) << ',' << format_error(c.sup_p)
       << ',' << csv_escape(c.status) << '\n';
  }
}

void write_csv(const std::vector<MonitorRecord>& monitors, std::ostream& os) {
  os << "n,t,l2_norm,h1_seminorm,memory_h1_seminorm,picard_iters\n";
  for (const MonitorRecord& m : monitors) {
    os << m.n << ',' << format_plain(m.t) << ',' << format_error(m.l2_norm) << ','
       << format_error(m.h1_seminorm) << ',' << format_error(m.memory_h1_seminorm) << ','
       << m.picard_iters << '\n';
  }
}

template <typename Table>
void write_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(table, os);
  os.flush();
  if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

template void write_csv(const RateTable&, const std::filesystem::path&);
template void write_csv(const std::vector<RateTable>&, const std::filesystem::path&);
template void write_csv(const StabilityTable&, const std::filesystem::path&);
template void write_csv(const std::vector<MonitorRecord>&, const std::filesystem::path&);

std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace oldroyd
