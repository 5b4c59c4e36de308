#include "lgeo/io/dataset.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "lgeo/error.hpp"

namespace lgeo::io {

namespace {

// Mean Omega per (model, layer), two decimals, layers indexed from 0.
constexpr std::array kRecords = {
    SignatureRecord{"Qwen-1.5B", 0, 0.31},
    SignatureRecord{"Qwen-1.5B", 1, 0.36},
    SignatureRecord{"Qwen-1.5B", 2, 0.39},
    SignatureRecord{"Qwen-1.5B", 3, 0.39},
    SignatureRecord{"Qwen-1.5B", 4, 0.37},
    SignatureRecord{"Qwen-1.5B", 5, 0.43},
    SignatureRecord{"Qwen-1.5B", 6, 0.41},
    SignatureRecord{"Qwen-1.5B", 7, 0.45},
    SignatureRecord{"Qwen-1.5B", 8, 0.41},
    SignatureRecord{"Qwen-1.5B", 9, 0.41},
    SignatureRecord{"Qwen-1.5B", 10, 0.45},
    SignatureRecord{"Qwen-1.5B", 11, 0.48},
    SignatureRecord{"Qwen-1.5B", 12, 0.52},
    SignatureRecord{"Qwen-1.5B", 13, 0.48},
    SignatureRecord{"Qwen-1.5B", 14, 0.54},
    SignatureRecord{"Qwen-1.5B", 15, 0.46},
    SignatureRecord{"Qwen-1.5B", 16, 0.50},
    SignatureRecord{"Qwen-1.5B", 17, 0.51},
    SignatureRecord{"Qwen-1.5B", 18, 0.53},
    SignatureRecord{"Qwen-1.5B", 19, 0.52},
    SignatureRecord{"Qwen-1.5B", 20, 0.52},
    SignatureRecord{"Qwen-1.5B", 21, 0.59},
    SignatureRecord{"Qwen-1.5B", 22, 0.54},
    SignatureRecord{"Qwen-1.5B", 23, 0.60},
    SignatureRecord{"Qwen-1.5B", 24, 0.62},
    SignatureRecord{"Qwen-1.5B", 25, 0.60},
    SignatureRecord{"Qwen-1.5B", 26, 0.68},
    SignatureRecord{"Qwen-1.5B", 27, 0.67},
    SignatureRecord{"MiroThinker-30B", 0, 0.42},
    SignatureRecord{"MiroThinker-30B", 1, 0.45},
    SignatureRecord{"MiroThinker-30B", 2, 0.52},
    SignatureRecord{"MiroThinker-30B", 3, 0.46},
    SignatureRecord{"MiroThinker-30B", 4, 0.45},
    SignatureRecord{"MiroThinker-30B", 5, 0.52},
    SignatureRecord{"MiroThinker-30B", 6, 0.47},
    SignatureRecord{"MiroThinker-30B", 7, 0.51},
    SignatureRecord{"MiroThinker-30B", 8, 0.56},
    SignatureRecord{"MiroThinker-30B", 9, 0.54},
    SignatureRecord{"MiroThinker-30B", 10, 0.58},
    SignatureRecord{"MiroThinker-30B", 11, 0.54},
    SignatureRecord{"MiroThinker-30B", 12, 0.59},
    SignatureRecord{"MiroThinker-30B", 13, 0.61},
    SignatureRecord{"MiroThinker-30B", 14, 0.64},
    SignatureRecord{"MiroThinker-30B", 15, 0.59},
    SignatureRecord{"MiroThinker-30B", 16, 0.65},
    SignatureRecord{"MiroThinker-30B", 17, 0.62},
    SignatureRecord{"MiroThinker-30B", 18, 0.62},
    SignatureRecord{"MiroThinker-30B", 19, 0.69},
    SignatureRecord{"MiroThinker-30B", 20, 0.90},
    SignatureRecord{"MiroThinker-30B", 21, 0.86},
    SignatureRecord{"MiroThinker-30B", 22, 0.80},
    SignatureRecord{"MiroThinker-30B", 23, 0.85},
    SignatureRecord{"MiroThinker-30B", 24, 0.81},
    SignatureRecord{"MiroThinker-30B", 25, 0.85},
    SignatureRecord{"MiroThinker-30B", 26, 0.88},
    SignatureRecord{"MiroThinker-30B", 27, 0.91},
    SignatureRecord{"MiroThinker-30B", 28, 0.85},
    SignatureRecord{"MiroThinker-30B", 29, 0.93},
    SignatureRecord{"MiroThinker-30B", 30, 0.88},
    SignatureRecord{"MiroThinker-30B", 31, 0.86},
    SignatureRecord{"MiroThinker-30B", 32, 0.89},
    SignatureRecord{"MiroThinker-30B", 33, 0.94},
    SignatureRecord{"MiroThinker-30B", 34, 0.93},
    SignatureRecord{"MiroThinker-30B", 35, 0.92},
    SignatureRecord{"MiroThinker-30B", 36, 0.90},
    SignatureRecord{"MiroThinker-30B", 37, 0.95},
    SignatureRecord{"MiroThinker-30B", 38, 0.98},
    SignatureRecord{"MiroThinker-30B", 39, 0.91},
    SignatureRecord{"MiroThinker-30B", 40, 0.92},
    SignatureRecord{"MiroThinker-30B", 41, 0.92},
    SignatureRecord{"MiroThinker-30B", 42, 0.98},
    SignatureRecord{"MiroThinker-30B", 43, 0.95},
    SignatureRecord{"MiroThinker-30B", 44, 0.90},
    SignatureRecord{"MiroThinker-30B", 45, 0.87},
    SignatureRecord{"MiroThinker-30B", 46, 0.91},
    SignatureRecord{"MiroThinker-30B", 47, 0.85},
    SignatureRecord{"Llama-3-8B", 0, 0.46},
    SignatureRecord{"Llama-3-8B", 1, 0.45},
    SignatureRecord{"Llama-3-8B", 2, 0.45},
    SignatureRecord{"Llama-3-8B", 3, 0.51},
    SignatureRecord{"Llama-3-8B", 4, 0.47},
    SignatureRecord{"Llama-3-8B", 5, 0.56},
    SignatureRecord{"Llama-3-8B", 6, 0.50},
    SignatureRecord{"Llama-3-8B", 7, 0.49},
    SignatureRecord{"Llama-3-8B", 8, 0.52},
    SignatureRecord{"Llama-3-8B", 9, 0.61},
    SignatureRecord{"Llama-3-8B", 10, 0.53},
    SignatureRecord{"Llama-3-8B", 11, 0.54},
    SignatureRecord{"Llama-3-8B", 12, 0.60},
    SignatureRecord{"Llama-3-8B", 13, 0.66},
    SignatureRecord{"Llama-3-8B", 14, 0.66},
    SignatureRecord{"Llama-3-8B", 15, 0.61},
    SignatureRecord{"Llama-3-8B", 16, 0.60},
    SignatureRecord{"Llama-3-8B", 17, 0.69},
    SignatureRecord{"Llama-3-8B", 18, 0.68},
    SignatureRecord{"Llama-3-8B", 19, 0.70},
    SignatureRecord{"Llama-3-8B", 20, 0.67},
    SignatureRecord{"Llama-3-8B", 21, 0.70},
    SignatureRecord{"Llama-3-8B", 22, 0.71},
    SignatureRecord{"Llama-3-8B", 23, 0.73},
    SignatureRecord{"Llama-3-8B", 24, 0.70},
    SignatureRecord{"Llama-3-8B", 25, 0.81},
    SignatureRecord{"Llama-3-8B", 26, 0.80},
    SignatureRecord{"Llama-3-8B", 27, 0.77},
    SignatureRecord{"Llama-3-8B", 28, 0.79},
    SignatureRecord{"Llama-3-8B", 29, 0.82},
    SignatureRecord{"Llama-3-8B", 30, 0.85},
    SignatureRecord{"Llama-3-8B", 31, 0.88},
    SignatureRecord{"Fimbulvetr-11B", 0, 0.49},
    SignatureRecord{"Fimbulvetr-11B", 1, 0.41},
    SignatureRecord{"Fimbulvetr-11B", 2, 0.43},
    SignatureRecord{"Fimbulvetr-11B", 3, 0.46},
    SignatureRecord{"Fimbulvetr-11B", 4, 0.49},
    SignatureRecord{"Fimbulvetr-11B", 5, 0.53},
    SignatureRecord{"Fimbulvetr-11B", 6, 0.50},
    SignatureRecord{"Fimbulvetr-11B", 7, 0.57},
    SignatureRecord{"Fimbulvetr-11B", 8, 0.53},
    SignatureRecord{"Fimbulvetr-11B", 9, 0.59},
    SignatureRecord{"Fimbulvetr-11B", 10, 0.57},
    SignatureRecord{"Fimbulvetr-11B", 11, 0.53},
    SignatureRecord{"Fimbulvetr-11B", 12, 0.58},
    SignatureRecord{"Fimbulvetr-11B", 13, 0.59},
    SignatureRecord{"Fimbulvetr-11B", 14, 0.64},
    SignatureRecord{"Fimbulvetr-11B", 15, 0.56},
    SignatureRecord{"Fimbulvetr-11B", 16, 0.66},
    SignatureRecord{"Fimbulvetr-11B", 17, 0.65},
    SignatureRecord{"Fimbulvetr-11B", 18, 0.60},
    SignatureRecord{"Fimbulvetr-11B", 19, 0.63},
    SignatureRecord{"Fimbulvetr-11B", 20, 0.81},
    SignatureRecord{"Fimbulvetr-11B", 21, 0.86},
    SignatureRecord{"Fimbulvetr-11B", 22, 0.84},
    SignatureRecord{"Fimbulvetr-11B", 23, 0.87},
    SignatureRecord{"Fimbulvetr-11B", 24, 0.88},
    SignatureRecord{"Fimbulvetr-11B", 25, 0.86},
    SignatureRecord{"Fimbulvetr-11B", 26, 0.88},
    SignatureRecord{"Fimbulvetr-11B", 27, 0.84},
    SignatureRecord{"Fimbulvetr-11B", 28, 0.92},
    SignatureRecord{"Fimbulvetr-11B", 29, 0.85},
    SignatureRecord{"Fimbulvetr-11B", 30, 0.92},
    SignatureRecord{"Fimbulvetr-11B", 31, 0.86},
    SignatureRecord{"Fimbulvetr-11B", 32, 0.96},
    SignatureRecord{"Fimbulvetr-11B", 33, 0.91},
    SignatureRecord{"Fimbulvetr-11B", 34, 0.92},
    SignatureRecord{"Fimbulvetr-11B", 35, 0.95},
    SignatureRecord{"Fimbulvetr-11B", 36, 0.91},
    SignatureRecord{"Fimbulvetr-11B", 37, 0.99},
    SignatureRecord{"Fimbulvetr-11B", 38, 0.94},
    SignatureRecord{"Fimbulvetr-11B", 39, 0.98},
    SignatureRecord{"Fimbulvetr-11B", 40, 0.93},
    SignatureRecord{"Fimbulvetr-11B", 41, 0.89},
    SignatureRecord{"Fimbulvetr-11B", 42, 0.95},
    SignatureRecord{"Fimbulvetr-11B", 43, 0.97},
    SignatureRecord{"Fimbulvetr-11B", 44, 0.96},
    SignatureRecord{"Fimbulvetr-11B", 45, 0.87},
    SignatureRecord{"Fimbulvetr-11B", 46, 0.90},
    SignatureRecord{"Fimbulvetr-11B", 47, 0.86},
    SignatureRecord{"Gemma-2-2B", 0, 0.39},
    SignatureRecord{"Gemma-2-2B", 1, 0.37},
    SignatureRecord{"Gemma-2-2B", 2, 0.33},
    SignatureRecord{"Gemma-2-2B", 3, 0.36},
    SignatureRecord{"Gemma-2-2B", 4, 0.37},
    SignatureRecord{"Gemma-2-2B", 5, 0.36},
    SignatureRecord{"Gemma-2-2B", 6, 0.38},
    SignatureRecord{"Gemma-2-2B", 7, 0.45},
    SignatureRecord{"Gemma-2-2B", 8, 0.43},
    SignatureRecord{"Gemma-2-2B", 9, 0.50},
    SignatureRecord{"Gemma-2-2B", 10, 0.44},
    SignatureRecord{"Gemma-2-2B", 11, 0.47},
    SignatureRecord{"Gemma-2-2B", 12, 0.50},
    SignatureRecord{"Gemma-2-2B", 13, 0.48},
    SignatureRecord{"Gemma-2-2B", 14, 0.49},
    SignatureRecord{"Gemma-2-2B", 15, 0.57},
    SignatureRecord{"Gemma-2-2B", 16, 0.55},
    SignatureRecord{"Gemma-2-2B", 17, 0.53},
    SignatureRecord{"Gemma-2-2B", 18, 0.55},
    SignatureRecord{"Gemma-2-2B", 19, 0.61},
    SignatureRecord{"Gemma-2-2B", 20, 0.58},
    SignatureRecord{"Gemma-2-2B", 21, 0.60},
    SignatureRecord{"Gemma-2-2B", 22, 0.58},
    SignatureRecord{"Gemma-2-2B", 23, 0.61},
    SignatureRecord{"Gemma-2-2B", 24, 0.66},
    SignatureRecord{"Gemma-2-2B", 25, 0.61},
};

}  // namespace

std::span<const SignatureRecord> embedded_dataset() { return kRecords; }

std::vector<std::string> embedded_models() {
  std::vector<std::string> out;
  for (const auto& r : kRecords) {
    if (out.empty() || out.back() != r.model_id) out.emplace_back(r.model_id);
  }
  return out;
}

std::optional<double> embedded_omega(std::string_view model, int layer) {
  for (const auto& r : kRecords) {
    if (r.model_id == model && r.layer == layer) return r.omega;
  }
  return std::nullopt;
}

phase::DepthProfile embedded_profile(std::string_view model) {
  std::vector<phase::ProfilePoint> points;
  for (const auto& r : kRecords) {
    if (r.model_id == model) points.push_back({r.layer, 0.0, r.omega, 0.0, 1});
  }
  if (points.empty()) throw InputError("unknown embedded model '" + std::string(model) + "'");
  const int total = static_cast<int>(points.size());
  return phase::make_profile(std::string(model), std::move(points), total);
}

std::uint64_t dataset_checksum(std::span<const SignatureRecord> records) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  char buf[32];
  for (const auto& r : records) {
    mix(r.model_id);
    std::snprintf(buf, sizeof buf, ",%d,%.2f\n", r.layer, r.omega);
    mix(buf);
  }
  return h;
}

}  // namespace lgeo::io
