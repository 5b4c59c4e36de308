#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <set>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lgeo/error.hpp"
#include "lgeo/io/activation_file.hpp"
#include "lgeo/io/config.hpp"
#include "lgeo/io/dataset.hpp"
#include "lgeo/io/profile_csv.hpp"
#include "lgeo/io/quantization.hpp"
#include "lgeo/io/report.hpp"
#include "lgeo/marchenko_pastur.hpp"
#include "lgeo/synth.hpp"

using lgeo::ActivationMatrix;
using lgeo::Matrix;
namespace io = lgeo::io;

namespace {

std::string encode(const ActivationMatrix& X) {
  std::ostringstream out(std::ios::binary);
  io::write_activations(X, out);
  return out.str();
}

ActivationMatrix decode(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return io::read_activations(in);
}

long long error_offset(const std::string& bytes) {
  try {
    (void)decode(bytes);
  } catch (const lgeo::FormatError& e) {
    return e.offset();
  }
  return -2;
}

io::LayerDiagnostics bare_row(std::string model, int layer) {
  io::LayerDiagnostics r;
  r.model_id = std::move(model);
  r.layer = layer;
  return r;
}

void put_u16(std::string& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<char>(v & 0xff);
  b[at + 1] = static_cast<char>(v >> 8);
}

void put_u32(std::string& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("activation round trip is bit exact") {
  ActivationMatrix X{Matrix{{1, 0}, {0, 1}}, 7, "toy-model"};
  const std::string bytes = encode(X);
  CHECK(bytes.size() == 32 + 16);
  CHECK(bytes.substr(0, 4) == "LGA1");
  const auto Y = decode(bytes);
  CHECK(Y.data == X.data);
  CHECK(Y.layer == 7);
  CHECK(Y.model_id == "toy-model");
  CHECK(encode(Y) == bytes);
}

TEST_CASE("header layout is little endian with a 16-byte aligned payload") {
  ActivationMatrix X{Matrix::Constant(3, 2, 1.5), 258, "abcdefghijklm"};
  const std::string b = encode(X);
  const auto* u = reinterpret_cast<const unsigned char*>(b.data());
  CHECK(u[4] == 1);
  CHECK(u[5] == 0);
  CHECK(u[6] == 1);
  CHECK(u[8] == 3);
  CHECK(u[12] == 2);
  CHECK(u[16] == 2);
  CHECK(u[17] == 1);
  CHECK(u[18] == 13);
  io::ActivationFileHeader h;
  h.model_id = "abcdefghijklm";
  CHECK(h.payload_offset() == 48);
  CHECK(b.size() == 48 + 24);
  float first = 0;
  std::memcpy(&first, b.data() + 48, 4);
  CHECK(first == 1.5f);
}

TEST_CASE("random matrices survive the float32 round trip") {
  std::mt19937_64 rng(2);
  std::normal_distribution<float> g;
  ActivationMatrix X{Matrix(17, 9), 3, ""};
  for (auto& v : X.data.reshaped()) v = g(rng);
  const auto Y = decode(encode(X));
  CHECK(Y.data == X.data);
}

TEST_CASE("format errors carry byte offsets") {
  const std::string good = encode({Matrix::Ones(2, 2), 1, "m"});
  std::string magic = good;
  magic[0] = 'X';
  CHECK(error_offset(magic) == 0);
  std::string version = good;
  put_u16(version, 4, 2);
  CHECK(error_offset(version) == 4);
  std::string dtype = good;
  put_u16(dtype, 6, 99);
  CHECK(error_offset(dtype) == 6);
  CHECK_THROWS_WITH_AS(decode(dtype), doctest::Contains("dtype"), lgeo::FormatError);
  CHECK(error_offset(good.substr(0, 10)) == 10);
  std::string longer = good;
  put_u32(longer, 8, 1000);
  CHECK(error_offset(longer) == 48);
  CHECK_THROWS_WITH_AS(decode(longer), doctest::Contains("8000"), lgeo::FormatError);
  CHECK(error_offset(good.substr(0, good.size() - 3)) == 45);
  CHECK(error_offset(good + "x") == 48);
  std::string huge = good;
  put_u32(huge, 8, 0xffffffffu);
  put_u32(huge, 12, 0xffffffffu);
  CHECK(error_offset(huge) >= 0);
}

TEST_CASE("write rejects layers that do not fit the header") {
  std::ostringstream out;
  CHECK_THROWS_AS(io::write_activations({Matrix::Ones(2, 2), 70000, ""}, out), lgeo::InputError);
  CHECK_THROWS_AS(io::read_activations(std::filesystem::path("/nonexistent/x.lga")), lgeo::InputError);
}

TEST_CASE("embedded dataset contents") {
  const auto all = io::embedded_dataset();
  CHECK(all.size() == 182);
  std::map<std::string, int> counts;
  for (const auto& r : all) counts[std::string(r.model_id)]++;
  CHECK(counts["Qwen-1.5B"] == 28);
  CHECK(counts["MiroThinker-30B"] == 48);
  CHECK(counts["Llama-3-8B"] == 32);
  CHECK(counts["Fimbulvetr-11B"] == 48);
  CHECK(counts["Gemma-2-2B"] == 26);
  CHECK(io::embedded_omega("MiroThinker-30B", 20) == 0.90);
  CHECK(io::embedded_omega("MiroThinker-30B", 19) == 0.69);
  CHECK(io::embedded_omega("Qwen-1.5B", 0) == 0.31);
  CHECK(io::embedded_omega("Fimbulvetr-11B", 37) == 0.99);
  CHECK(io::embedded_omega("Fimbulvetr-11B", 19) == 0.63);
  CHECK(io::embedded_omega("Fimbulvetr-11B", 20) == 0.81);
  CHECK_FALSE(io::embedded_omega("Qwen-1.5B", 28).has_value());
  CHECK(io::embedded_models() ==
        std::vector<std::string>{"Qwen-1.5B", "MiroThinker-30B", "Llama-3-8B", "Fimbulvetr-11B", "Gemma-2-2B"});
}

TEST_CASE("embedded dataset checksum is pinned") {
  CHECK(io::dataset_checksum(io::embedded_dataset()) == 0xac4867cf6eab12c9ULL);
}

TEST_CASE("embedded dataset keys are unique and values in range") {
  std::set<std::pair<std::string, int>> keys;
  for (const auto& r : io::embedded_dataset()) {
    CHECK(keys.insert({std::string(r.model_id), r.layer}).second);
    CHECK(r.omega >= 0.0);
    CHECK(r.omega < 1.0);
  }
  CHECK_THROWS_AS(io::embedded_profile("GPT-2"), lgeo::InputError);
  CHECK(io::embedded_profile("Gemma-2-2B").total_layers == 26);
}

TEST_CASE("profile CSV round trip of the embedded dataset") {
  std::vector<lgeo::phase::DepthProfile> profiles;
  for (const auto& m : io::embedded_models()) profiles.push_back(io::embedded_profile(m));
  std::stringstream ss;
  io::write_profile_csv(profiles, ss);
  const auto back = io::read_profile_csv(ss);
  REQUIRE(back.size() == profiles.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].model_id == profiles[i].model_id);
    CHECK(back[i].total_layers == profiles[i].total_layers);
    REQUIRE(back[i].points.size() == profiles[i].points.size());
    for (std::size_t j = 0; j < back[i].points.size(); ++j) {
      CHECK(back[i].points[j].mean_omega == profiles[i].points[j].mean_omega);
      CHECK(back[i].points[j].gamma == profiles[i].points[j].gamma);
    }
  }
}

TEST_CASE("profile CSV parsing rules") {
  std::istringstream minimal("model,layer,omega\nA,1,0.2\nA,0,0.1\nB,0,0.5\nB,1,0.6\n");
  const auto p = io::read_profile_csv(minimal);
  REQUIRE(p.size() == 2);
  CHECK(p[0].points[0].layer == 0);
  CHECK(p[0].total_layers == 2);

  std::istringstream bad_omega("model,layer,omega\nA,0,0.2\nA,1,1.5\n");
  CHECK_THROWS_WITH_AS(io::read_profile_csv(bad_omega), doctest::Contains("line 3"), lgeo::ParseError);
  std::istringstream missing("model,omega\nA,0.2\n");
  CHECK_THROWS_AS(io::read_profile_csv(missing), lgeo::InputError);
  std::istringstream dup("model,layer,omega\nA,0,0.2\nA,0,0.3\n");
  CHECK_THROWS_AS(io::read_profile_csv(dup), lgeo::InputError);
  std::istringstream junk("model,layer,omega\nA,zero,0.2\n");
  CHECK_THROWS_AS(io::read_profile_csv(junk), lgeo::ParseError);
  std::istringstream extra("model,layer,omega,var_omega,n,total_layers\nA,0,0.2,0.01,10,48\nA,1,0.3,0.02,10,48\n");
  const auto e = io::read_profile_csv(extra);
  CHECK(e[0].total_layers == 48);
  CHECK(e[0].points[1].var_omega == 0.02);
  CHECK(e[0].points[1].n == 10);
}

TEST_CASE("FSS CSV round trip") {
  std::istringstream in("model,N,layer,omega\na,1e9,0,0.1\na,1e9,1,0.2\nb,1e10,0,0.1\nb,1e10,1,0.3\n");
  const auto curves = io::read_fss_csv(in);
  REQUIRE(curves.size() == 2);
  CHECK(curves[1].scale == 1e10);
  std::stringstream ss;
  io::write_fss_csv(curves, ss);
  const auto back = io::read_fss_csv(ss);
  CHECK(back[1].profile.points[1].mean_omega == 0.3);
  std::istringstream no_n("model,layer,omega\na,0,0.1\n");
  CHECK_THROWS_AS(io::read_fss_csv(no_n), lgeo::InputError);
}

TEST_CASE("config files") {
  std::istringstream in("# comment\nd = 32\nq=0.5  # trailing\n\nname = spiked model\nflag = true\nlist = 1, 2.5,3\n");
  const auto kv = io::KeyValueConfig::parse(in);
  CHECK(kv.get_int("d", 0) == 32);
  CHECK(kv.get_double("q", 0) == 0.5);
  CHECK(kv.get_string("name", "") == "spiked model");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_doubles("list") == std::vector<double>{1, 2.5, 3});
  CHECK(kv.get_double("missing", 7.0) == 7.0);
  CHECK_NOTHROW(kv.require_known({"d", "q", "name", "flag", "list"}));
  CHECK_THROWS_AS(kv.require_known({"d"}), lgeo::ConfigError);
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_WITH_AS(io::KeyValueConfig::parse(dup), doctest::Contains("line 2"), lgeo::ParseError);
  std::istringstream noeq("just words\n");
  CHECK_THROWS_AS(io::KeyValueConfig::parse(noeq), lgeo::ParseError);
  std::istringstream badnum("d = 3x\n");
  CHECK_THROWS_AS(io::KeyValueConfig::parse(badnum).get_int("d", 0), lgeo::ConfigError);
}

TEST_CASE("quantization noise") {
  ActivationMatrix X{Matrix::Random(50, 4), 2, "x"};
  CHECK(io::add_quantization_noise(X, 0.0, 1).data == X.data);
  CHECK_THROWS_AS(io::add_quantization_noise(X, -1.0, 1), lgeo::InputError);

  lgeo::synth::SpikedConfig cfg;
  cfg.d = 8;
  cfg.T = 100000;
  cfg.spikes.push_back({4.0, lgeo::synth::random_orthonormal(8, 1, 3).front()});
  const auto clean = lgeo::synth::sample_spiked(cfg);
  const auto noisy = io::add_quantization_noise(clean, 0.5, 9);
  const double shift =
      lgeo::covariance_spectrum(noisy).largest() - lgeo::covariance_spectrum(clean).largest();
  CHECK(std::abs(shift - 0.5) < 0.03 * lgeo::covariance_spectrum(clean).largest());
}

TEST_CASE("large spikes survive quantization noise") {
  lgeo::synth::SpikedConfig cfg;
  cfg.d = 300;
  cfg.T = 1200;
  cfg.seed = 4;
  cfg.spikes.push_back({20.0, lgeo::synth::random_orthonormal(cfg.d, 1, 8).front()});
  const auto X = lgeo::synth::sample_spiked(cfg);
  const auto noisy = io::add_quantization_noise(X, 1.0, 10);
  const auto s = lgeo::covariance_spectrum(noisy);
  const auto fit = lgeo::rmt::fit_sigma2(s, 0.25);
  CHECK(lgeo::rmt::detect_spikes(s, fit).count() == 1);
}

TEST_CASE("report JSON round trip") {
  io::ReportDocument doc;
  doc.tool_version = "1.2.3";
  doc.command = "critical-depth";
  doc.config = {{"tau", "0.75"}};
  io::LayerDiagnostics row;
  row.model_id = "m";
  row.layer = 3;
  row.gamma = 0.1 + 0.2;
  row.n = 12;
  row.omega_mean = 1.0 / 3.0;
  row.spike_count = 2;
  doc.layers = {row, bare_row("m", 4)};
  doc.phase = lgeo::phase::critical_depth(io::embedded_profile("MiroThinker-30B"));
  doc.mp = lgeo::rmt::MPModel(1.0 / 7.0, 0.3);
  doc.scalars = {{"z", 1e-300}, {"a", -2.5}};
  doc.series = {{"eig", {3.0, 2.0, 1e-17}}};
  doc.checks = {{"ok", true, ""}, {"bad", false, "detail"}};
  const auto back = io::report_from_json(io::to_json(doc));
  CHECK(back == doc);
  CHECK_FALSE(back.all_checks_passed());
  CHECK(back.scalars[0].first == "z");
}

TEST_CASE("report JSON rejects malformed input") {
  CHECK_THROWS_AS(io::report_from_json("{"), lgeo::FormatError);
  CHECK_THROWS_AS(io::report_from_json("{}"), lgeo::FormatError);
}

TEST_CASE("empty reports and flat formats") {
  io::ReportDocument doc;
  doc.command = "omega";
  const std::string json = io::emit_report(doc, io::ReportFormat::Json);
  CHECK(json.find("\"layers\": []") != std::string::npos);
  CHECK(io::report_from_json(json) == doc);

  for (int i = 0; i < 5; ++i) doc.layers.push_back(bare_row("model a", i));
  doc.layers[1].omega_mean = 0.5;
  const std::string gp = io::emit_report(doc, io::ReportFormat::Gnuplot);
  CHECK(std::count(gp.begin(), gp.end(), '\n') == 6);
  CHECK(gp[0] == '#');
  CHECK(gp.find("model_a 1") != std::string::npos);
  CHECK(gp.find("nan") != std::string::npos);
  const std::string csv = io::emit_report(doc, io::ReportFormat::Csv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.rfind("model,layer,", 0) == 0);
  CHECK(io::parse_report_format("gnuplot") == io::ReportFormat::Gnuplot);
  CHECK_THROWS_AS(io::parse_report_format("xml"), lgeo::InputError);
}

}  // TEST_SUITE
