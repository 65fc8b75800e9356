#include "forgetlab/nn/arch.hpp"

#include <cmath>

#include "forgetlab/error.hpp"
#include "forgetlab/tensor.hpp"

namespace forgetlab::nn {

std::string to_string(ArchKind k) {
  switch (k) {
    case ArchKind::mlp:
      return "mlp";
    case ArchKind::conv:
      return "conv";
    case ArchKind::conv_residual:
      return "conv-residual";
  }
  return "?";
}

ArchKind arch_kind_from_string(const std::string& s) {
  if (s == "mlp") return ArchKind::mlp;
  if (s == "conv") return ArchKind::conv;
  if (s == "conv-residual") return ArchKind::conv_residual;
  throw ConfigError("unknown arch kind '" + s + "' (expected mlp | conv | conv-residual)");
}

std::vector<std::size_t> ArchSpec::default_conv_channels(std::size_t stages) {
  const std::size_t base[5] = {16, 32, 64, 128, 128};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stages; ++i) out.push_back(base[std::min<std::size_t>(i, 4)]);
  return out;
}

namespace {
std::size_t scale(std::size_t w, double m) {
  auto s = static_cast<std::size_t>(std::llround(static_cast<double>(w) * m));
  return s == 0 ? 1 : s;
}
}  // namespace

std::vector<std::size_t> ArchSpec::scaled_widths() const {
  std::vector<std::size_t> out;
  out.reserve(widths.size());
  for (std::size_t w : widths) out.push_back(scale(w, width_multiplier));
  return out;
}

std::vector<std::size_t> ArchSpec::scaled_fc_widths() const {
  std::vector<std::size_t> out;
  out.reserve(fc_widths.size());
  for (std::size_t w : fc_widths) out.push_back(scale(w, width_multiplier));
  return out;
}

std::size_t ArchSpec::head_features() const {
  if (!fc_widths.empty()) return scaled_fc_widths().back();
  if (kind == ArchKind::mlp) return scaled_widths().back();
  std::size_t s = widths.size();
  std::size_t h = in_height >> s, w = in_width >> s;
  return scaled_widths().back() * h * w;
}

void ArchSpec::validate() const {
  if (stage_count() < 2) throw ConfigError("arch needs at least 2 stages, got " + std::to_string(stage_count()));
  if (widths.empty()) throw ConfigError("arch field 'widths' must be non-empty");
  for (std::size_t w : widths) {
    if (w == 0) throw ConfigError("arch field 'widths' must be positive");
  }
  for (std::size_t w : fc_widths) {
    if (w == 0) throw ConfigError("arch field 'fc_widths' must be positive");
  }
  if (width_multiplier <= 0.0) throw ConfigError("arch field 'width_multiplier' must be positive");
  if (kind == ArchKind::mlp) {
    if (input_dim == 0) throw ConfigError("arch field 'input_dim' required for mlp");
    if (!fc_widths.empty()) throw ConfigError("arch field 'fc_widths' only applies to conv kinds");
  } else {
    if (in_channels == 0 || in_height == 0 || in_width == 0) {
      throw ConfigError("arch field 'in_channels/in_height/in_width' must be positive");
    }
    if (kernel % 2 == 0 || kernel == 0) throw ConfigError("arch field 'kernel' must be odd");
    std::size_t s = widths.size();
    if ((in_height % (1u << s)) != 0 || (in_width % (1u << s)) != 0) {
      throw ConfigError("arch input extent must be divisible by 2^stages for pooling");
    }
  }
}

std::uint64_t ArchSpec::fingerprint() const {
  std::uint64_t h = fnv1a64(to_string(kind));
  auto mix_sz = [&h](std::size_t v) { h = fnv1a64(&v, sizeof(v), h); };
  mix_sz(input_dim);
  mix_sz(in_channels);
  mix_sz(in_height);
  mix_sz(in_width);
  mix_sz(kernel);
  for (std::size_t w : scaled_widths()) mix_sz(w);
  mix_sz(0xffffu);
  for (std::size_t w : scaled_fc_widths()) mix_sz(w);
  return h;
}

}  // namespace forgetlab::nn
