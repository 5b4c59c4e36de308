#include "lgeo/io/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "lgeo/error.hpp"

namespace lgeo::io {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json layer_json(const LayerDiagnostics& l) {
  return {{"model_id", l.model_id},           {"layer", l.layer},
          {"gamma", opt(l.gamma)},            {"n", l.n},
          {"omega_mean", opt(l.omega_mean)},  {"omega_var", opt(l.omega_var)},
          {"omega_min", opt(l.omega_min)},    {"omega_max", opt(l.omega_max)},
          {"entropy", opt(l.entropy)},        {"effective_rank", opt(l.effective_rank)},
          {"pr_dimension", opt(l.pr_dimension)}, {"spike_count", opt(l.spike_count)},
          {"ks", opt(l.ks)}};
}

LayerDiagnostics layer_from(const json& j) {
  LayerDiagnostics l;
  l.model_id = j.at("model_id").get<std::string>();
  l.layer = j.at("layer").get<int>();
  l.gamma = get_opt<double>(j, "gamma");
  l.n = j.at("n").get<std::size_t>();
  l.omega_mean = get_opt<double>(j, "omega_mean");
  l.omega_var = get_opt<double>(j, "omega_var");
  l.omega_min = get_opt<double>(j, "omega_min");
  l.omega_max = get_opt<double>(j, "omega_max");
  l.entropy = get_opt<double>(j, "entropy");
  l.effective_rank = get_opt<double>(j, "effective_rank");
  l.pr_dimension = get_opt<double>(j, "pr_dimension");
  l.spike_count = get_opt<std::size_t>(j, "spike_count");
  l.ks = get_opt<double>(j, "ks");
  return l;
}

json phase_json(const phase::PhaseReport& p) {
  return {{"model_id", p.model_id},
          {"total_layers", p.total_layers},
          {"gamma_c_hat", p.gamma_c_hat},
          {"jump_layer_pair", {p.jump_layer_pair.first, p.jump_layer_pair.second}},
          {"jump_magnitude", p.jump_magnitude},
          {"susceptibility_peak_gamma", opt(p.susceptibility_peak_gamma)},
          {"exceeds_threshold", p.exceeds_threshold},
          {"tau_c", p.tau_c},
          {"onset_layer", opt(p.onset_layer)}};
}

phase::PhaseReport phase_from(const json& j) {
  phase::PhaseReport p;
  p.model_id = j.at("model_id").get<std::string>();
  p.total_layers = j.at("total_layers").get<int>();
  p.gamma_c_hat = j.at("gamma_c_hat").get<double>();
  const auto& pair = j.at("jump_layer_pair");
  p.jump_layer_pair = {pair.at(0).get<int>(), pair.at(1).get<int>()};
  p.jump_magnitude = j.at("jump_magnitude").get<double>();
  p.susceptibility_peak_gamma = get_opt<double>(j, "susceptibility_peak_gamma");
  p.exceeds_threshold = j.at("exceeds_threshold").get<bool>();
  p.tau_c = j.at("tau_c").get<double>();
  p.onset_layer = get_opt<int>(j, "onset_layer");
  return p;
}

const char* kColumns[] = {"model",      "layer",     "gamma",     "n",       "omega_mean",
                          "omega_var",  "omega_min", "omega_max", "entropy", "effective_rank",
                          "pr_dimension", "spike_count", "ks"};

std::string number(const std::optional<double>& v, const char* missing) {
  if (!v) return missing;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::vector<std::string> layer_cells(const LayerDiagnostics& l, const char* missing) {
  return {l.model_id,
          std::to_string(l.layer),
          number(l.gamma, missing),
          std::to_string(l.n),
          number(l.omega_mean, missing),
          number(l.omega_var, missing),
          number(l.omega_min, missing),
          number(l.omega_max, missing),
          number(l.entropy, missing),
          number(l.effective_rank, missing),
          number(l.pr_dimension, missing),
          l.spike_count ? std::to_string(*l.spike_count) : std::string(missing),
          number(l.ks, missing)};
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "gnuplot") return ReportFormat::Gnuplot;
  throw InputError("unknown report format '" + std::string(name) + "'");
}

bool ReportDocument::all_checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string to_json(const ReportDocument& r, int indent) {
  json j;
  j["tool_version"] = r.tool_version;
  j["command"] = r.command;
  j["config"] = r.config;
  j["layers"] = json::array();
  for (const auto& l : r.layers) j["layers"].push_back(layer_json(l));
  j["phase"] = r.phase ? phase_json(*r.phase) : json(nullptr);
  if (r.mp) {
    j["mp"] = {{"sigma2", r.mp->sigma2()},
               {"c", r.mp->c()},
               {"lambda_minus", r.mp->lambda_minus()},
               {"lambda_plus", r.mp->lambda_plus()},
               {"mass_at_zero", r.mp->mass_at_zero()}};
  } else {
    j["mp"] = nullptr;
  }
  // Arrays of pairs rather than objects so insertion order survives.
  j["scalars"] = json::array();
  for (const auto& [name, value] : r.scalars) j["scalars"].push_back({{"name", name}, {"value", value}});
  j["series"] = json::array();
  for (const auto& [name, values] : r.series) j["series"].push_back({{"name", name}, {"values", values}});
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return j.dump(indent) + "\n";
}

ReportDocument report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    ReportDocument r;
    r.tool_version = j.at("tool_version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& l : j.at("layers")) r.layers.push_back(layer_from(l));
    if (!j.at("phase").is_null()) r.phase = phase_from(j.at("phase"));
    if (!j.at("mp").is_null()) {
      r.mp.emplace(j.at("mp").at("sigma2").get<double>(), j.at("mp").at("c").get<double>());
    }
    for (const auto& s : j.at("scalars")) {
      r.scalars.emplace_back(s.at("name").get<std::string>(), s.at("value").get<double>());
    }
    for (const auto& s : j.at("series")) {
      r.series.emplace_back(s.at("name").get<std::string>(), s.at("values").get<std::vector<double>>());
    }
    for (const auto& c : j.at("checks")) {
      r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                          c.at("detail").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid report JSON: ") + e.what());
  }
}

std::string emit_report(const ReportDocument& r, ReportFormat format) {
  if (format == ReportFormat::Json) return to_json(r);
  std::ostringstream out;
  const bool csv = format == ReportFormat::Csv;
  const char* sep = csv ? "," : " ";
  if (!csv) out << "# ";
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? sep : "") << kColumns[i];
  out << '\n';
  for (const auto& l : r.layers) {
    auto cells = layer_cells(l, csv ? "" : "nan");
    if (!csv) std::replace(cells[0].begin(), cells[0].end(), ' ', '_');
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? sep : "") << cells[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace lgeo::io
