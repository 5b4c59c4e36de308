#include "lgeo/io/profile_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "lgeo/error.hpp"

namespace lgeo::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const char* column, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(std::string("bad value '") + s + "' in column " + column, line);
  }
  return v;
}

long long parse_int(const std::string& s, const char* column, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad integer '") + s + "' in column " + column, line);
  }
  return v;
}

struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line, cells)

  std::optional<std::size_t> find(const std::string& name) const {
    const auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  }
};

Table read_table(std::istream& in, std::initializer_list<const char*> required) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto cells = split(stripped);
    if (!have_header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!t.columns.emplace(cells[i], i).second) {
          throw ParseError("duplicate column '" + cells[i] + "'", lineno);
        }
      }
      for (const char* name : required) {
        if (!t.columns.count(name)) throw ParseError(std::string("header is missing column '") + name + "'", lineno);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw ParseError("expected " + std::to_string(t.columns.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       lineno);
    }
    t.rows.emplace_back(lineno, std::move(cells));
  }
  if (!have_header) throw ParseError("missing header row", lineno == 0 ? 1 : lineno);
  return t;
}

struct Row {
  std::size_t line;
  std::string model;
  phase::ProfilePoint point;
  int total_layers;
  double scale;
};

std::vector<Row> parse_rows(const Table& t, bool with_scale) {
  const auto model_col = *t.find("model");
  const auto layer_col = *t.find("layer");
  const auto omega_col = *t.find("omega");
  const auto var_col = t.find("var_omega");
  const auto n_col = t.find("n");
  const auto total_col = t.find("total_layers");
  const auto scale_col = t.find("N");
  std::vector<Row> rows;
  std::set<std::pair<std::string, long long>> seen;
  for (const auto& [line, cells] : t.rows) {
    Row r{line, cells[model_col], {}, 0, 1.0};
    if (r.model.empty()) throw ParseError("empty model name", line);
    const long long layer = parse_int(cells[layer_col], "layer", line);
    if (layer < 0 || layer > std::numeric_limits<int>::max()) throw ParseError("layer out of range", line);
    r.point.layer = static_cast<int>(layer);
    r.point.mean_omega = parse_double(cells[omega_col], "omega", line);
    if (!(r.point.mean_omega >= 0.0 && r.point.mean_omega < 1.0)) {
      throw ParseError("omega " + cells[omega_col] + " outside [0, 1)", line);
    }
    if (var_col) {
      r.point.var_omega = parse_double(cells[*var_col], "var_omega", line);
      if (r.point.var_omega < 0.0) throw ParseError("negative var_omega", line);
    }
    if (n_col) {
      const long long n = parse_int(cells[*n_col], "n", line);
      if (n < 1) throw ParseError("n must be >= 1", line);
      r.point.n = static_cast<std::size_t>(n);
    }
    if (total_col) {
      const long long L = parse_int(cells[*total_col], "total_layers", line);
      if (L < 1 || L > std::numeric_limits<int>::max()) throw ParseError("total_layers out of range", line);
      r.total_layers = static_cast<int>(L);
    }
    if (with_scale) {
      r.scale = parse_double(cells[*scale_col], "N", line);
      if (!(r.scale > 0.0)) throw ParseError("N must be > 0", line);
    }
    if (!seen.emplace(r.model, layer).second) {
      throw ParseError("duplicate (model, layer) = (" + r.model + ", " + cells[layer_col] + ")", line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

struct Group {
  std::vector<phase::ProfilePoint> points;
  int total_layers = 0;
  double scale = 0.0;
  std::size_t first_line = 0;
};

std::vector<std::pair<std::string, Group>> group_rows(const std::vector<Row>& rows, bool with_scale) {
  std::vector<std::pair<std::string, Group>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, inserted] = index.emplace(r.model, groups.size());
    if (inserted) groups.push_back({r.model, Group{{}, r.total_layers, r.scale, r.line}});
    Group& g = groups[it->second].second;
    if (g.total_layers != r.total_layers) throw ParseError("inconsistent total_layers for " + r.model, r.line);
    if (with_scale && g.scale != r.scale) throw ParseError("inconsistent N for " + r.model, r.line);
    g.points.push_back(r.point);
  }
  return groups;
}

phase::DepthProfile to_profile(const std::string& model, Group g) {
  try {
    return phase::make_profile(model, std::move(g.points), g.total_layers);
  } catch (const InputError& e) {
    throw ParseError(e.what(), g.first_line);
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<phase::DepthProfile> read_profile_csv(std::istream& in) {
  const Table t = read_table(in, {"model", "layer", "omega"});
  std::vector<phase::DepthProfile> out;
  for (auto& [model, g] : group_rows(parse_rows(t, false), false)) out.push_back(to_profile(model, std::move(g)));
  return out;
}

std::vector<phase::DepthProfile> read_profile_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_profile_csv(in);
}

void write_profile_csv(const std::vector<phase::DepthProfile>& profiles, std::ostream& out) {
  out << "model,layer,omega,var_omega,n,total_layers\n" << std::setprecision(17);
  for (const auto& p : profiles) {
    for (const auto& pt : p.points) {
      out << p.model_id << ',' << pt.layer << ',' << pt.mean_omega << ',' << pt.var_omega << ','
          << pt.n << ',' << p.total_layers << '\n';
    }
  }
}

std::vector<phase::ScaledCurve> read_fss_csv(std::istream& in) {
  const Table t = read_table(in, {"model", "N", "layer", "omega"});
  std::vector<phase::ScaledCurve> out;
  for (auto& [model, g] : group_rows(parse_rows(t, true), true)) {
    const double scale = g.scale;
    out.push_back({scale, to_profile(model, std::move(g))});
  }
  return out;
}

std::vector<phase::ScaledCurve> read_fss_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_fss_csv(in);
}

void write_fss_csv(const std::vector<phase::ScaledCurve>& curves, std::ostream& out) {
  out << "model,N,layer,omega,total_layers\n" << std::setprecision(17);
  for (const auto& c : curves) {
    for (const auto& pt : c.profile.points) {
      out << c.profile.model_id << ',' << c.scale << ',' << pt.layer << ',' << pt.mean_omega << ','
          << c.profile.total_layers << '\n';
    }
  }
}

}  // namespace lgeo::io
