#pragma once

// Config parsing and result serialization.
//
// Configs are flat `key = value` text (one key per line, `#` comments) or a
// JSON object with the same keys. Tables are written as CSV with a header row,
// or as JSON {"columns": [...], "rows": [[...], ...]}. Floating-point values
// carry 12 significant digits in both formats.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "infolat/protocols.hpp"

namespace infolat::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline std::string format_double(double v) { return fmt::format("{:.12g}", v); }

/// v rounded to 12 significant digits, so JSON output matches the CSVs.
inline double round12(double v) { return std::isfinite(v) ? std::stod(format_double(v)) : v; }

/// Short label for a time in file names: 40 -> "40", 172.5 -> "172.5".
inline std::string time_label(double t) { return fmt::format("{:g}", t); }

// ---------------------------------------------------------------------------
// Config

namespace detail {

enum class KeyKind { text, integer, real, real_list, coords, window, boolean };

inline const std::map<std::string, KeyKind, std::less<>>& config_keys() {
  static const std::map<std::string, KeyKind, std::less<>> keys{
      {"protocol", KeyKind::text},          {"N", KeyKind::integer},
      {"l_Q", KeyKind::integer},            {"probe_length", KeyKind::integer},
      {"l_X", KeyKind::integer},            {"l_P", KeyKind::integer},
      {"mu_i", KeyKind::real},              {"mu_f", KeyKind::real},
      {"mu_p", KeyKind::real},              {"tau", KeyKind::real},
      {"tau_p", KeyKind::real},             {"tau_t", KeyKind::real},
      {"mu", KeyKind::real},                {"barrier_width", KeyKind::integer},
      {"mu_p_regularizer", KeyKind::real},  {"t_start", KeyKind::real},
      {"t_stop", KeyKind::real},            {"dt", KeyKind::real},
      {"times", KeyKind::real_list},        {"snapshot_times", KeyKind::real_list},
      {"profile_times", KeyKind::real_list}, {"tracked", KeyKind::coords},
      {"decay_window", KeyKind::window},    {"profile_window", KeyKind::window},
      {"baseline_lattice", KeyKind::boolean}, {"compare_effective", KeyKind::boolean},
  };
  return keys;
}

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(std::string_view s, std::string_view separators) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : s) {
    if (separators.find(ch) != std::string_view::npos) {
      if (!trim(current).empty()) out.push_back(trim(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!trim(current).empty()) out.push_back(trim(current));
  return out;
}

inline double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  }
}

// One key = value line to its JSON form.
inline json text_value(const std::string& key, KeyKind kind, const std::string& text) {
  switch (kind) {
    case KeyKind::text: return text;
    case KeyKind::integer: return parse_integer(key, text);
    case KeyKind::real: return parse_real(key, text);
    case KeyKind::real_list: {
      json list = json::array();
      if (text == "none") return list;
      for (const auto& item : split(text, ", \t")) list.push_back(parse_real(key, item));
      return list;
    }
    case KeyKind::coords: {
      // "2:8, 3:7" -> [[2, 8], [3, 7]]
      json list = json::array();
      if (text == "none") return list;
      for (const auto& item : split(text, ", \t")) {
        const auto parts = split(item, ":");
        if (parts.size() != 2) throw ConfigError(fmt::format("{}: expected ell:m, got '{}'", key, item));
        list.push_back(json::array({parse_integer(key, parts[0]), parse_integer(key, parts[1])}));
      }
      return list;
    }
    case KeyKind::window: {
      if (text == "none" || text == "default") return nullptr;
      const auto parts = split(text, ", \t");
      if (parts.size() != 2) throw ConfigError(fmt::format("{}: expected 'lo, hi', got '{}'", key, text));
      return json::array({parse_real(key, parts[0]), parse_real(key, parts[1])});
    }
    case KeyKind::boolean:
      if (text == "true" || text == "1" || text == "yes") return true;
      if (text == "false" || text == "0" || text == "no") return false;
      throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
  }
  return nullptr;
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("{}: wrong value type ({})", key, j.dump()));
  }
}

inline std::optional<FitWindow> get_window(const json& j, const std::string& key) {
  if (j.is_null()) return std::nullopt;
  const auto v = get_as<std::vector<double>>(j, key);
  if (v.size() != 2) throw ConfigError(fmt::format("{}: expected [lo, hi]", key));
  return FitWindow{v[0], v[1]};
}

}  // namespace detail

/// Builds a config from a JSON object: protocol defaults first, then every
/// key present. Unknown keys are errors. The result is validated.
inline QuenchConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("protocol")) throw ConfigError("config has no 'protocol' key");
  QuenchConfig c = default_config(protocol_from_name(detail::get_as<std::string>(j.at("protocol"), "protocol")));
  for (const auto& [key, value] : j.items()) {
    if (!detail::config_keys().contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
    auto integer = [&] { return static_cast<Index>(detail::get_as<long long>(value, key)); };
    auto real = [&] { return detail::get_as<double>(value, key); };
    if (key == "protocol") continue;
    if (key == "N") c.sites = integer();
    else if (key == "l_Q") c.lq = integer();
    else if (key == "probe_length") c.probe_length = integer();
    else if (key == "l_X") c.lx = integer();
    else if (key == "l_P") c.lp = integer();
    else if (key == "mu_i") c.mu_i = real();
    else if (key == "mu_f") c.mu_f = real();
    else if (key == "mu_p") c.mu_p = real();
    else if (key == "tau") c.tau = real();
    else if (key == "tau_p") c.tau_p = real();
    else if (key == "tau_t") c.tau_t = real();
    else if (key == "mu") c.mu = real();
    else if (key == "barrier_width") c.barrier_width = integer();
    else if (key == "mu_p_regularizer") c.mu_p_regularizer = real();
    else if (key == "t_start") c.t_start = real();
    else if (key == "t_stop") c.t_stop = real();
    else if (key == "dt") c.dt = real();
    else if (key == "times") c.times = detail::get_as<std::vector<double>>(value, key);
    else if (key == "snapshot_times") c.snapshot_times = detail::get_as<std::vector<double>>(value, key);
    else if (key == "profile_times") c.profile_times = detail::get_as<std::vector<double>>(value, key);
    else if (key == "tracked") {
      c.tracked.clear();
      for (const auto& pair : detail::get_as<std::vector<std::vector<long long>>>(value, key)) {
        if (pair.size() != 2) throw ConfigError("tracked: expected [ell, m] pairs");
        c.tracked.push_back({static_cast<Index>(pair[0]), static_cast<Index>(pair[1])});
      }
    } else if (key == "decay_window") c.decay_window = detail::get_window(value, key);
    else if (key == "profile_window") c.profile_window = detail::get_window(value, key);
    else if (key == "baseline_lattice") c.baseline_lattice = detail::get_as<bool>(value, key);
    else if (key == "compare_effective") c.compare_effective = detail::get_as<bool>(value, key);
  }
  c.validate();
  return c;
}

/// Every key, so the echo does not depend on protocol defaults.
inline json config_to_json(const QuenchConfig& c) {
  json j;
  j["protocol"] = std::string(protocol_name(c.protocol));
  j["N"] = c.sites;
  j["l_Q"] = c.lq;
  j["probe_length"] = c.probe_length;
  j["l_X"] = c.lx;
  j["l_P"] = c.lp;
  j["mu_i"] = c.mu_i;
  j["mu_f"] = c.mu_f;
  j["mu_p"] = c.mu_p;
  j["tau"] = c.tau;
  j["tau_p"] = c.tau_p;
  j["tau_t"] = c.tau_t;
  j["mu"] = c.mu;
  j["barrier_width"] = c.barrier_width;
  j["mu_p_regularizer"] = c.mu_p_regularizer;
  j["t_start"] = c.t_start;
  j["t_stop"] = c.t_stop;
  j["dt"] = c.dt;
  j["times"] = c.times;
  j["snapshot_times"] = c.snapshot_times;
  j["profile_times"] = c.profile_times;
  json tracked = json::array();
  for (const auto& coord : c.tracked) tracked.push_back(json::array({coord.ell, coord.m}));
  j["tracked"] = tracked;
  auto window = [](const std::optional<FitWindow>& w) -> json {
    if (!w) return nullptr;
    return json::array({w->lo, w->hi});
  };
  j["decay_window"] = window(c.decay_window);
  j["profile_window"] = window(c.profile_window);
  j["baseline_lattice"] = c.baseline_lattice;
  j["compare_effective"] = c.compare_effective;
  return j;
}

/// key = value lines; `#` starts a comment.
inline QuenchConfig parse_config_text(std::string_view text) {
  json j = json::object();
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", number));
    const std::string key = detail::trim(std::string_view(stripped).substr(0, eq));
    const std::string value = detail::trim(std::string_view(stripped).substr(eq + 1));
    const auto found = detail::config_keys().find(key);
    if (found == detail::config_keys().end()) {
      throw ConfigError(fmt::format("line {}: unknown config key '{}'", number, key));
    }
    if (j.contains(key)) throw ConfigError(fmt::format("line {}: duplicate key '{}'", number, key));
    j[key] = detail::text_value(key, found->second, value);
  }
  return config_from_json(j);
}

/// JSON when the first non-blank character is '{', key = value otherwise.
inline QuenchConfig parse_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    return config_from_json(j);
  }
  return parse_config_text(text);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline QuenchConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

/// key = value form of a config, accepted by parse_config.
inline std::string config_to_text(const QuenchConfig& c) {
  std::string out;
  const json j = config_to_json(c);
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_null()) {
      text = "none";
    } else if (value.is_string()) {
      text = value.get<std::string>();
    } else if (key == "tracked") {
      std::vector<std::string> items;
      for (const auto& pair : value) items.push_back(fmt::format("{}:{}", pair[0].get<Index>(), pair[1].get<Index>()));
      text = fmt::format("{}", fmt::join(items, ", "));
    } else if (value.is_array()) {
      std::vector<std::string> items;
      for (const auto& v : value) items.push_back(fmt::format("{}", v.get<double>()));
      text = fmt::format("{}", fmt::join(items, ", "));
    } else if (value.is_number_float()) {
      text = fmt::format("{}", value.get<double>());
    } else {
      text = value.dump();
    }
    if (text.empty()) text = "none";
    out += fmt::format("{} = {}\n", key, text);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tables

enum class Format { csv, json };

inline Format format_from_name(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError(fmt::format("unknown output format '{}'", name));
}

using Cell = std::variant<double, Index, std::string>;

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error(fmt::format("table {}: row width mismatch", name));
    rows.push_back(std::move(row));
  }
};

inline std::string to_csv(const Table& t) {
  std::string out = fmt::format("{}\n", fmt::join(t.columns, ","));
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) out += format_double(v);
            else if constexpr (std::is_same_v<V, Index>) out += fmt::format("{}", v);
            else out += v;
          },
          row[k]);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const Table& t) {
  json j;
  j["columns"] = t.columns;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& cell : row) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) r.push_back(round12(v));
            else r.push_back(v);
          },
          cell);
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(1) + "\n";
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

/// Writes <dir>/<name>.csv or .json and returns the file name.
inline std::string write_table(const Table& t, const fs::path& dir, Format format) {
  const std::string file = t.name + (format == Format::csv ? ".csv" : ".json");
  write_text(dir / file, format == Format::csv ? to_csv(t) : to_json(t));
  return file;
}

/// Rows of a CSV with a header; cells stay text.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] == name) return k;
    }
    throw ConfigError(fmt::format("CSV has no column '{}'", name));
  }
  std::vector<double> numbers(std::string_view name) const {
    const std::size_t k = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(detail::parse_real(std::string(name), row[k]));
    return out;
  }
};

inline CsvData read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvData data;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(fmt::format("'{}' is empty", path.string()));
  data.columns = detail::split(line, ",");
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto row = detail::split(line, ",");
    if (row.size() != data.columns.size()) throw ConfigError(fmt::format("'{}': ragged row", path.string()));
    data.rows.push_back(std::move(row));
  }
  return data;
}

// ---------------------------------------------------------------------------
// RunResult to tables

inline Table lattice_table(const InformationLattice& lat, std::string name) {
  Table t{std::move(name), {"ell", "two_n", "m", "S_bits", "i_bits"}, {}};
  lat.local().for_each([&](LatticeCoord c, double v) {
    t.add({c.ell, c.two_n(), c.m, lat.entropy(c.ell, c.m), v});
  });
  return t;
}

inline Table delta_table(const TriangularArray& delta, std::string name) {
  Table t{std::move(name), {"ell", "two_n", "m", "delta_bits"}, {}};
  delta.for_each([&](LatticeCoord c, double v) { t.add({c.ell, c.two_n(), c.m, v}); });
  return t;
}

/// Rebuilds a lattice from the S_bits column of a lattice table.
inline InformationLattice lattice_from_csv(const CsvData& csv) {
  const auto ell = csv.numbers("ell");
  const auto m = csv.numbers("m");
  const auto s = csv.numbers("S_bits");
  Index sites = 0;
  for (double v : ell) sites = std::max(sites, static_cast<Index>(v) + 1);
  TriangularArray entropies(sites);
  if (entropies.size() != s.size()) throw ConfigError("lattice CSV does not cover a full triangle");
  for (std::size_t k = 0; k < s.size(); ++k) entropies(static_cast<Index>(ell[k]), static_cast<Index>(m[k])) = s[k];
  return InformationLattice::from_entropies(std::move(entropies));
}

inline Table series_table(std::string name, const std::vector<double>& times, const std::vector<double>& values) {
  Table t{std::move(name), {"t", "bits"}, {}};
  for (std::size_t k = 0; k < times.size(); ++k) t.add({times[k], values[k]});
  return t;
}

inline std::vector<Table> run_tables(const RunResult& r) {
  std::vector<Table> tables;

  Table gamma{"gamma", {"t", "partition", "bits"}, {}};
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    for (auto p : all_partitions) gamma.add({r.times[k], std::string(partition_name(p)), r.gamma.at(p)[k]});
  }
  tables.push_back(std::move(gamma));

  Table occupation{"occupation", {"t", "site", "density"}, {}};
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    for (std::size_t s = 0; s < r.occupation[k].size(); ++s) {
      occupation.add({r.times[k], static_cast<Index>(s), r.occupation[k][s]});
    }
  }
  tables.push_back(std::move(occupation));

  tables.push_back(series_table("interface", r.times, r.interface));
  tables.push_back(series_table("diagonal", r.times, r.diagonal));
  tables.push_back(series_table("itop", r.times, r.top_info));
  tables.push_back(series_table("total", r.times, r.total_info));

  if (!r.config.tracked.empty()) {
    Table tracked{"tracked", {"t", "ell", "m", "bits"}, {}};
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      for (std::size_t c = 0; c < r.config.tracked.size(); ++c) {
        tracked.add({r.times[k], r.config.tracked[c].ell, r.config.tracked[c].m, r.tracked[k][c]});
      }
    }
    tables.push_back(std::move(tracked));
  }

  if (r.baseline) tables.push_back(lattice_table(*r.baseline, "lattice_baseline"));
  for (const auto& snap : r.snapshots) {
    tables.push_back(lattice_table(snap.lattice, "lattice_t" + time_label(snap.t)));
    if (snap.delta) tables.push_back(delta_table(*snap.delta, "delta_t" + time_label(snap.t)));
  }
  for (const auto& profile : r.profiles) {
    Table t{"profile_t" + time_label(profile.t), {"ell", "bits"}, {}};
    for (std::size_t k = 0; k < profile.values.size(); ++k) t.add({static_cast<Index>(k + 1), profile.values[k]});
    tables.push_back(std::move(t));
  }
  return tables;
}

inline json fit_to_json(const std::string& name, const FitResult& f) {
  json j;
  j["name"] = name;
  j["model"] = fit_model_name(f.model);
  j["parameter"] = round12(f.parameter);
  j["intercept"] = round12(f.intercept);
  j["window"] = json::array({round12(f.window.lo), round12(f.window.hi)});
  j["points"] = f.points;
  j["residual_norm"] = round12(f.residual_norm);
  j["flagged"] = f.flagged;
  j["note"] = f.note;
  return j;
}

inline json fits_to_json(const std::vector<NamedFit>& fits) {
  json list = json::array();
  for (const auto& f : fits) list.push_back(fit_to_json(f.name, f.fit));
  return json{{"fits", list}};
}

inline json comparison_to_json(const EffectiveComparison& c) {
  json j;
  j["max_interface_deviation"] = round12(c.max_interface_deviation);
  j["max_diagonal_deviation"] = round12(c.max_diagonal_deviation);
  for (const auto& [key, sums] : {std::pair{"max_gamma_deviation", c.max_gamma_deviation},
                                  std::pair{"asymptote_full", c.asymptote_full},
                                  std::pair{"asymptote_effective", c.asymptote_effective},
                                  std::pair{"asymptote_deviation", c.asymptote_deviation}}) {
    json per;
    for (auto p : all_partitions) per[std::string(partition_name(p))] = round12(sums[slot(p)]);
    j[key] = per;
  }
  return j;
}

/// Writes every table of a run plus fits.json; returns the file names in write order.
inline std::vector<std::string> write_run(const RunResult& r, const fs::path& dir, Format format,
                                          const std::optional<EffectiveComparison>& comparison = std::nullopt) {
  fs::create_directories(dir);
  std::vector<std::string> files;
  for (const auto& t : run_tables(r)) files.push_back(write_table(t, dir, format));
  write_text(dir / "fits.json", fits_to_json(r.fits).dump(1) + "\n");
  files.push_back("fits.json");
  if (comparison) {
    write_text(dir / "compare_effective.json", comparison_to_json(*comparison).dump(1) + "\n");
    files.push_back("compare_effective.json");
  }
  return files;
}

}  // namespace infolat::io
