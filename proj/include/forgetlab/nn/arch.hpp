#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace forgetlab::nn {

enum class ArchKind { mlp, conv, conv_residual };

std::string to_string(ArchKind k);
ArchKind arch_kind_from_string(const std::string& s);

/// Body architecture. A "stage" is the unit all probes operate on:
/// dense+relu for mlp, conv-relu-conv-relu-pool for conv (with an identity
/// shortcut around the second conv in the residual variant). Optional dense
/// stages may follow the conv stack.
struct ArchSpec {
  ArchKind kind = ArchKind::mlp;

  // mlp: flat input width
  std::size_t input_dim = 0;
  // conv: image input
  std::size_t in_channels = 3;
  std::size_t in_height = 32;
  std::size_t in_width = 32;

  /// Hidden width (mlp) or channel count (conv) per stage.
  std::vector<std::size_t> widths;
  /// Dense stages appended after the conv stack (e.g. {1024, 1024}).
  std::vector<std::size_t> fc_widths;

  std::size_t kernel = 3;  // stride 1, pad kernel/2
  double width_multiplier = 1.0;

  std::size_t stage_count() const { return widths.size() + fc_widths.size(); }
  std::vector<std::size_t> scaled_widths() const;
  std::vector<std::size_t> scaled_fc_widths() const;
  /// Flattened feature count feeding the heads.
  std::size_t head_features() const;

  void validate() const;
  std::uint64_t fingerprint() const;

  static std::vector<std::size_t> default_conv_channels(std::size_t stages);
};

}  // namespace forgetlab::nn
