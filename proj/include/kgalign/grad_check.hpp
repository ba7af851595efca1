#ifndef KGALIGN_GRAD_CHECK_HPP
#define KGALIGN_GRAD_CHECK_HPP

#include <functional>
#include <map>
#include <string>

#include "kgalign/tape.hpp"

namespace kgalign {

// Compares reverse-mode gradients against central finite differences.
// Returns max over coordinates of |analytic - numeric| / max(1, |numeric|).
//
// The builder must construct a scalar graph from the input id and be
// deterministic across calls (re-seed any rng it uses internally).
double grad_check(const std::function<Tape::Id(Tape&, Tape::Id)>& f, const Tensor& x,
                  double eps = 1e-5);

// Same check against every coordinate of every named input.
double grad_check_params(
    const std::function<Tape::Id(Tape&, const std::map<std::string, Tape::Id>&)>& f,
    const std::map<std::string, Tensor>& inputs, double eps = 1e-5);

}  // namespace kgalign

#endif
