#ifndef KGALIGN_CHECKPOINT_HPP
#define KGALIGN_CHECKPOINT_HPP

#include <map>
#include <string>

#include "kgalign/tensor.hpp"

namespace kgalign {

// Binary container: magic + version, then name -> (shape, dtype, raw values).
// Integers and floats are encoded little-endian regardless of host order.
// Values are stored as f64 by default; f32 mode halves checkpoint size at the
// cost of rounding.
void save_checkpoint(const std::string& path, const std::map<std::string, Tensor>& params,
                     bool float32 = false);

std::map<std::string, Tensor> load_checkpoint(const std::string& path);

}  // namespace kgalign

#endif
