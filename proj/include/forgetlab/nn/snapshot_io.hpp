#pragma once

#include <string>

#include "forgetlab/nn/model.hpp"

namespace forgetlab::nn {

/// Binary tensor container. Layout (all integers little-endian):
///   magic "FLTC", u32 version (1), u64 fingerprint,
///   u32 label length, label bytes,
///   u32 record count, then per record:
///     u32 name length, name bytes, u32 ndim, u64 dims..., f64 data.
void save_snapshot(const std::string& path, const ParamSnapshot& snap);
ParamSnapshot load_snapshot(const std::string& path);

}  // namespace forgetlab::nn
