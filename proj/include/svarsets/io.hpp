#pragma once

// Data ingestion, variable transforms, and run configuration.
//
// CSV input is RFC-4180 style: mandatory header row, optional leading date
// column (detected by non-numeric cells), quoted fields with embedded
// commas/quotes/newlines.  Transforms are per-variable pipelines applied
// in declared order; differencing shortens the sample and realigns every
// series (and the dates) from the tail.  Run configuration is a sectioned
// key = value text file; repeatable keys (restrictions, targets) accumulate.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/confidence_sets.hpp"
#include "svarsets/moment_inequality.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/var.hpp"

namespace svarsets {

// ---------------------------------------------------------------- CSV --

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // skip records that are entirely empty (trailing newline etc.)
    if (!(record.size() == 1 && record[0].empty())) records.push_back(record);
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw config_error("csv: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline CsvTable read_csv_file(const std::string& path) {
  const auto records = detail::parse_csv_records(detail::read_file(path));
  if (records.empty()) throw config_error("csv: file is empty: " + path);
  CsvTable table;
  table.header = records.front();
  table.rows.assign(records.begin() + 1, records.end());
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (table.rows[r].size() != table.header.size())
      throw config_error("csv: row " + std::to_string(r + 2) + " has " +
                         std::to_string(table.rows[r].size()) + " fields, header has " +
                         std::to_string(table.header.size()));
  return table;
}

struct LoadedSeries {
  TimeSeriesData data;
  std::vector<std::string> dates;  // empty when the file has no date column
};

// Header row mandatory; a leading column with any non-numeric cell is
// treated as dates and carried through untouched.
inline LoadedSeries load_series_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  if (table.rows.empty()) throw config_error("csv: no data rows in " + path);
  const std::size_t cols = table.header.size();
  if (cols < 1) throw config_error("csv: no columns in " + path);

  bool first_is_date = false;
  for (const auto& row : table.rows) {
    double v;
    if (!detail::parse_double(row[0], v)) {
      first_is_date = true;
      break;
    }
  }
  const std::size_t start = first_is_date ? 1 : 0;
  if (cols - start < 1) throw config_error("csv: no numeric columns in " + path);

  LoadedSeries out;
  out.data.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                         static_cast<Eigen::Index>(cols - start));
  for (std::size_t c = start; c < cols; ++c)
    out.data.names.push_back(detail::trim(table.header[c]));
  if (first_is_date) out.dates.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (first_is_date) out.dates.push_back(table.rows[r][0]);
    for (std::size_t c = start; c < cols; ++c) {
      double v;
      if (!detail::parse_double(table.rows[r][c], v))
        throw config_error("csv: non-numeric cell at row " + std::to_string(r + 2) +
                           ", column '" + table.header[c] + "': '" + table.rows[r][c] + "'");
      out.data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - start)) = v;
    }
  }
  return out;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

inline void write_series_csv(const std::string& path, const TimeSeriesData& data,
                             const std::vector<std::string>& dates = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path);
  const bool with_dates = !dates.empty();
  if (with_dates && static_cast<int>(dates.size()) != data.T())
    throw config_error("write_series_csv: date column length mismatch");
  if (static_cast<int>(data.names.size()) != data.n())
    throw config_error("write_series_csv: need one name per variable");
  if (with_dates) out << "date";
  for (int j = 0; j < data.n(); ++j) {
    if (with_dates || j > 0) out << ',';
    out << detail::csv_escape(data.names[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  for (int t = 0; t < data.T(); ++t) {
    if (with_dates) out << detail::csv_escape(dates[static_cast<std::size_t>(t)]);
    for (int j = 0; j < data.n(); ++j) {
      if (with_dates || j > 0) out << ',';
      out << detail::format_double(data.values(t, j));
    }
    out << '\n';
  }
}

// --------------------------------------------------------- transforms --

enum class TransformKind { None, Log, ScaleBy100, ScaleBy400, LogDifference, LinearDetrend };

inline TransformKind parse_transform(const std::string& name) {
  const std::string t = detail::trim(name);
  if (t == "none") return TransformKind::None;
  if (t == "log") return TransformKind::Log;
  if (t == "scale-by-100") return TransformKind::ScaleBy100;
  if (t == "scale-by-400") return TransformKind::ScaleBy400;
  if (t == "log-difference") return TransformKind::LogDifference;
  if (t == "linear-detrend") return TransformKind::LinearDetrend;
  throw config_error("unknown transform '" + t + "' (expected none, log, scale-by-100, "
                     "scale-by-400, log-difference, linear-detrend)");
}

// A log-difference acts on a series that is already in logs, so a log step
// after a log-difference step is rejected as an ordering mistake.
inline void validate_pipeline(const std::vector<TransformKind>& steps) {
  bool differenced = false;
  for (const TransformKind step : steps) {
    if (step == TransformKind::LogDifference) differenced = true;
    if (step == TransformKind::Log && differenced)
      throw config_error("transforms: log declared after log-difference; "
                         "take logs before differencing");
  }
}

namespace detail {

inline Vector linear_detrend(const Vector& y) {
  const Eigen::Index len = y.size();
  Matrix x(len, 2);
  x.col(0).setOnes();
  x.col(1) = Vector::LinSpaced(len, 1.0, static_cast<double>(len));
  const Vector beta = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  return y - x * beta;
}

}  // namespace detail

// Apply per-variable pipelines (parallel array to the data columns), then
// realign all series and dates to a common sample from the tail.
inline LoadedSeries apply_transforms(const LoadedSeries& in,
                                     const std::vector<std::vector<TransformKind>>& pipelines) {
  if (static_cast<int>(pipelines.size()) != in.data.n())
    throw config_error("transforms: need one pipeline per variable");
  const int t_in = in.data.T();
  std::vector<Vector> series;
  series.reserve(pipelines.size());
  int min_len = t_in;
  for (std::size_t j = 0; j < pipelines.size(); ++j) {
    validate_pipeline(pipelines[j]);
    Vector y = in.data.values.col(static_cast<Eigen::Index>(j));
    for (const TransformKind step : pipelines[j]) {
      switch (step) {
        case TransformKind::None:
          break;
        case TransformKind::Log:
          for (Eigen::Index t = 0; t < y.size(); ++t) {
            if (!(y(t) > 0.0))
              throw config_error("transforms: log of non-positive value in variable '" +
                                 in.data.names[j] + "'");
            y(t) = std::log(y(t));
          }
          break;
        case TransformKind::ScaleBy100:
          y *= 100.0;
          break;
        case TransformKind::ScaleBy400:
          y *= 400.0;
          break;
        case TransformKind::LogDifference: {
          if (y.size() < 2)
            throw config_error("transforms: series too short to difference");
          Vector d = y.tail(y.size() - 1) - y.head(y.size() - 1);
          y = std::move(d);
          break;
        }
        case TransformKind::LinearDetrend:
          y = detail::linear_detrend(y);
          break;
      }
    }
    min_len = std::min(min_len, static_cast<int>(y.size()));
    series.push_back(std::move(y));
  }
  if (min_len < 1) throw config_error("transforms: no observations left after differencing");

  LoadedSeries out;
  out.data.names = in.data.names;
  out.data.values.resize(min_len, static_cast<Eigen::Index>(series.size()));
  for (std::size_t j = 0; j < series.size(); ++j)
    out.data.values.col(static_cast<Eigen::Index>(j)) = series[j].tail(min_len);
  if (!in.dates.empty())
    out.dates.assign(in.dates.end() - min_len, in.dates.end());
  return out;
}

// ------------------------------------------------------------- config --

// Sectioned key = value file.  Keys may repeat within a section; order is
// preserved.  Full-line comments start with '#' or ';'.
struct IniFile {
  // section -> ordered (key, value) pairs
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

  std::vector<std::string> get_all(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    const auto it = sections.find(section);
    if (it == sections.end()) return out;
    for (const auto& [k, v] : it->second)
      if (k == key) out.push_back(v);
    return out;
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto all = get_all(section, key);
    if (all.empty()) return std::nullopt;
    if (all.size() > 1)
      throw config_error("config: key '" + key + "' in section [" + section +
                         "] given more than once");
    return all.front();
  }

  bool has_section(const std::string& section) const {
    return sections.find(section) != sections.end();
  }
};

inline IniFile parse_ini(const std::string& text) {
  IniFile ini;
  std::string section;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(line_no) + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(line_no) + ": empty section name");
      ini.sections[section];  // register even if empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(line_no) + ": empty key");
    ini.sections[section].emplace_back(key, value);
  }
  return ini;
}

inline IniFile parse_ini_file(const std::string& path) {
  return parse_ini(detail::read_file(path));
}

namespace detail {

inline long parse_integer(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw config_error(what + ": expected an integer, got '" + s + "'");
  return v;
}

inline double parse_real(const std::string& s, const std::string& what) {
  double v;
  if (!parse_double(s, v)) throw config_error(what + ": expected a number, got '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "true" || t == "on" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "off" || t == "no" || t == "0") return false;
  throw config_error(what + ": expected true/false, got '" + s + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

// "0,1" or "0..4" or mixtures: "0,2..4"
inline std::vector<int> parse_horizons(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const std::string& part : split(s, ',')) {
    const std::size_t dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(parse_integer(part, what)));
    } else {
      const int a = static_cast<int>(parse_integer(part.substr(0, dots), what));
      const int b = static_cast<int>(parse_integer(part.substr(dots + 2), what));
      if (b < a) throw config_error(what + ": descending horizon range '" + part + "'");
      for (int h = a; h <= b; ++h) out.push_back(h);
    }
  }
  if (out.empty()) throw config_error(what + ": no horizons given");
  for (int h : out)
    if (h < 0) throw config_error(what + ": negative horizon");
  return out;
}

}  // namespace detail

// One declared restriction line: a variable reference (name or 1-based
// index), the sign, and the horizons it applies to.
struct SignSpec {
  std::string variable;
  SignDirection direction = SignDirection::NonNegative;
  std::vector<int> horizons;
  bool cumulative = false;
};

struct TargetSpec {
  TargetKind kind = TargetKind::Irf;
  std::string variable;
  std::vector<int> horizons;  // ignored for variance shares
};

struct RunConfig {
  std::string data_path;
  std::vector<std::pair<std::string, std::vector<TransformKind>>> transforms;

  int lags = 1;
  Deterministics det = Deterministics::Intercept;

  int zero_impacts = 0;
  std::vector<SignSpec> signs;
  std::vector<TargetSpec> targets;
  std::optional<double> theta_lower;
  std::optional<double> theta_upper;

  double alpha1 = 0.05;
  double alpha2 = 0.05;
  int n_q = 0;       // 0: 629 for n=2, 20000 otherwise
  int n_z = 0;       // 0: 500 for n=2, 1000 otherwise
  int n_lambda = 1000;
  std::uint64_t seed = 1;
  WeightScheme scheme = WeightScheme::Identity;
  bool share_draws = true;
  int threads = 1;

  int bayes_draws = 10000;
  double bayes_level = 0.90;

  std::string out_dir = ".";
};

namespace detail {

inline void check_known_keys(const IniFile& ini, const std::string& section,
                             const std::set<std::string>& known) {
  const auto it = ini.sections.find(section);
  if (it == ini.sections.end()) return;
  for (const auto& [k, v] : it->second)
    if (known.find(k) == known.end())
      throw config_error("config: unknown key '" + k + "' in section [" + section + "]");
}

}  // namespace detail

inline RunConfig parse_run_config(const IniFile& ini) {
  for (const auto& [name, entries] : ini.sections) {
    static const std::set<std::string> known_sections = {
        "data", "var", "restrictions", "targets", "inference", "bayes", "output"};
    if (known_sections.find(name) == known_sections.end())
      throw config_error("config: unknown section [" + name + "]");
    (void)entries;
  }
  detail::check_known_keys(ini, "data", {"path", "transform"});
  detail::check_known_keys(ini, "var", {"lags", "deterministics"});
  detail::check_known_keys(ini, "restrictions",
                           {"zero_impacts", "nonnegative", "nonpositive",
                            "cumulative-nonnegative", "cumulative-nonpositive"});
  detail::check_known_keys(ini, "targets",
                           {"irf", "cumulative-irf", "variance-share", "lower-bound", "upper-bound"});
  detail::check_known_keys(ini, "inference",
                           {"alpha1", "alpha2", "n_q", "n_z", "n_lambda", "seed",
                            "weight-scheme", "share-draws", "threads"});
  detail::check_known_keys(ini, "bayes", {"draws", "level"});
  detail::check_known_keys(ini, "output", {"dir"});

  RunConfig cfg;
  if (auto v = ini.get("data", "path")) cfg.data_path = *v;
  else throw config_error("config: [data] path is required");

  // transform lines: "transform = variable : log, log-difference, scale-by-400"
  for (const std::string& line : ini.get_all("data", "transform")) {
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw config_error("config: transform needs the form 'variable : step, step, ...'");
    const std::string var = detail::trim(line.substr(0, colon));
    std::vector<TransformKind> steps;
    for (const std::string& s : detail::split(line.substr(colon + 1), ','))
      steps.push_back(parse_transform(s));
    validate_pipeline(steps);
    cfg.transforms.emplace_back(var, std::move(steps));
  }

  if (auto v = ini.get("var", "lags"))
    cfg.lags = static_cast<int>(detail::parse_integer(*v, "config: lags"));
  if (auto v = ini.get("var", "deterministics")) {
    const std::string t = detail::trim(*v);
    if (t == "none") cfg.det = Deterministics::None;
    else if (t == "intercept") cfg.det = Deterministics::Intercept;
    else if (t == "intercept-trend") cfg.det = Deterministics::InterceptTrend;
    else throw config_error("config: deterministics must be none, intercept, or intercept-trend");
  }

  if (auto v = ini.get("restrictions", "zero_impacts"))
    cfg.zero_impacts = static_cast<int>(detail::parse_integer(*v, "config: zero_impacts"));
  auto read_signs = [&](const char* key, SignDirection dir, bool cumulative) {
    for (const std::string& line : ini.get_all("restrictions", key)) {
      // "variable @ horizons"
      const std::size_t at = line.find('@');
      if (at == std::string::npos)
        throw config_error(std::string("config: ") + key +
                           " needs the form 'variable @ horizons'");
      SignSpec spec;
      spec.variable = detail::trim(line.substr(0, at));
      spec.direction = dir;
      spec.cumulative = cumulative;
      spec.horizons = detail::parse_horizons(line.substr(at + 1), "config: restriction horizons");
      cfg.signs.push_back(std::move(spec));
    }
  };
  read_signs("nonnegative", SignDirection::NonNegative, false);
  read_signs("nonpositive", SignDirection::NonPositive, false);
  read_signs("cumulative-nonnegative", SignDirection::NonNegative, true);
  read_signs("cumulative-nonpositive", SignDirection::NonPositive, true);

  auto read_targets = [&](const char* key, TargetKind kind) {
    for (const std::string& line : ini.get_all("targets", key)) {
      TargetSpec spec;
      spec.kind = kind;
      if (kind == TargetKind::VarianceShare) {
        spec.variable = detail::trim(line);
        spec.horizons = {0};
      } else {
        const std::size_t at = line.find('@');
        if (at == std::string::npos)
          throw config_error(std::string("config: ") + key +
                             " needs the form 'variable @ horizons'");
        spec.variable = detail::trim(line.substr(0, at));
        spec.horizons = detail::parse_horizons(line.substr(at + 1), "config: target horizons");
      }
      cfg.targets.push_back(std::move(spec));
    }
  };
  read_targets("irf", TargetKind::Irf);
  read_targets("cumulative-irf", TargetKind::CumulativeIrf);
  read_targets("variance-share", TargetKind::VarianceShare);
  if (auto v = ini.get("targets", "lower-bound"))
    cfg.theta_lower = detail::parse_real(*v, "config: lower-bound");
  if (auto v = ini.get("targets", "upper-bound"))
    cfg.theta_upper = detail::parse_real(*v, "config: upper-bound");

  if (auto v = ini.get("inference", "alpha1"))
    cfg.alpha1 = detail::parse_real(*v, "config: alpha1");
  if (auto v = ini.get("inference", "alpha2"))
    cfg.alpha2 = detail::parse_real(*v, "config: alpha2");
  if (auto v = ini.get("inference", "n_q"))
    cfg.n_q = static_cast<int>(detail::parse_integer(*v, "config: n_q"));
  if (auto v = ini.get("inference", "n_z"))
    cfg.n_z = static_cast<int>(detail::parse_integer(*v, "config: n_z"));
  if (auto v = ini.get("inference", "n_lambda"))
    cfg.n_lambda = static_cast<int>(detail::parse_integer(*v, "config: n_lambda"));
  if (auto v = ini.get("inference", "seed"))
    cfg.seed = static_cast<std::uint64_t>(detail::parse_integer(*v, "config: seed"));
  if (auto v = ini.get("inference", "weight-scheme")) {
    const std::string t = detail::trim(*v);
    if (t == "identity") cfg.scheme = WeightScheme::Identity;
    else if (t == "inverse-correlation") cfg.scheme = WeightScheme::InverseCorrelation;
    else throw config_error("config: weight-scheme must be identity or inverse-correlation");
  }
  if (auto v = ini.get("inference", "share-draws"))
    cfg.share_draws = detail::parse_bool(*v, "config: share-draws");
  if (auto v = ini.get("inference", "threads"))
    cfg.threads = static_cast<int>(detail::parse_integer(*v, "config: threads"));

  if (auto v = ini.get("bayes", "draws"))
    cfg.bayes_draws = static_cast<int>(detail::parse_integer(*v, "config: bayes draws"));
  if (auto v = ini.get("bayes", "level"))
    cfg.bayes_level = detail::parse_real(*v, "config: bayes level");

  if (auto v = ini.get("output", "dir")) cfg.out_dir = *v;

  if (cfg.lags < 0) throw config_error("config: lags must be >= 0");
  if (cfg.alpha1 <= 0.0 || cfg.alpha1 >= 1.0 || cfg.alpha2 <= 0.0 || cfg.alpha2 >= 1.0)
    throw config_error("config: alpha levels must lie in (0, 1)");
  if (cfg.threads < 1) throw config_error("config: threads must be >= 1");
  return cfg;
}

inline RunConfig parse_run_config_file(const std::string& path) {
  return parse_run_config(parse_ini_file(path));
}

// Resolve a variable reference (column name or 1-based index) to 0-based.
inline int resolve_variable(const std::string& token, const std::vector<std::string>& names) {
  const std::string t = detail::trim(token);
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == t) return static_cast<int>(j);
  // fall back to a 1-based integer index
  long idx = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
  if (ec == std::errc() && p == t.data() + t.size()) {
    if (idx < 1 || idx > static_cast<long>(names.size()))
      throw config_error("variable index " + t + " out of range 1.." +
                         std::to_string(names.size()));
    return static_cast<int>(idx - 1);
  }
  throw config_error("unknown variable '" + t + "'");
}

// Expand the parsed config into the model inputs, given the data header.
struct ResolvedRestrictions {
  RestrictionSet restrictions;
  std::vector<ThetaTarget> targets;
  std::vector<std::string> target_labels;  // per target, for output files
};

inline ResolvedRestrictions resolve_restrictions(const RunConfig& cfg,
                                                 const std::vector<std::string>& names) {
  ResolvedRestrictions out;
  out.restrictions.zero_count = cfg.zero_impacts;
  for (const SignSpec& s : cfg.signs) {
    const int var = resolve_variable(s.variable, names);
    for (int h : s.horizons)
      out.restrictions.signs.push_back({var, h, s.direction, s.cumulative});
  }
  for (const TargetSpec& t : cfg.targets) {
    const int var = resolve_variable(t.variable, names);
    for (int h : t.horizons) {
      ThetaTarget target;
      target.kind = t.kind;
      target.variable = var;
      target.horizon = t.kind == TargetKind::VarianceShare ? 0 : h;
      target.lower_bound = cfg.theta_lower;
      target.upper_bound = cfg.theta_upper;
      out.targets.push_back(target);
      const char* label = t.kind == TargetKind::Irf ? "irf"
                          : t.kind == TargetKind::CumulativeIrf ? "cum-irf"
                                                                : "vshare";
      out.target_labels.push_back(label);
    }
  }
  return out;
}

// -------------------------------------------------------------- output --

struct BandRow {
  std::string target;
  int variable = 0;  // 1-based in the file
  int horizon = 0;
  Interval fhat;
  Interval cs;
  std::optional<Interval> bayes;
};

inline std::string band_csv_text(const std::vector<BandRow>& rows) {
  std::ostringstream out;
  out << "target,variable,horizon,fhat_lo,fhat_hi,cs_lo,cs_hi,bayes_lo,bayes_hi\n";
  auto cell = [](const Interval& iv, bool lo) {
    if (iv.empty) return std::string("nan");
    return detail::format_double(lo ? iv.lo : iv.hi);
  };
  for (const BandRow& r : rows) {
    out << detail::csv_escape(r.target) << ',' << r.variable << ',' << r.horizon << ','
        << cell(r.fhat, true) << ',' << cell(r.fhat, false) << ',' << cell(r.cs, true) << ','
        << cell(r.cs, false) << ',';
    if (r.bayes) out << cell(*r.bayes, true) << ',' << cell(*r.bayes, false);
    else out << "nan,nan";
    out << '\n';
  }
  return out.str();
}

inline void write_band_csv(const std::string& path, const std::vector<BandRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path);
  out << band_csv_text(rows);
}

// FNV-1a, used to fingerprint configurations in run manifests.
inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace svarsets
