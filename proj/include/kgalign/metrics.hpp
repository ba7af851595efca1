#ifndef KGALIGN_METRICS_HPP
#define KGALIGN_METRICS_HPP

#include <string>

namespace kgalign {

// Binary classification metrics with fake as the positive class.
// Zero-division precision/recall (and the resulting f1) are defined as 0.
struct Metrics {
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  int total() const { return tp + fp + fn + tn; }
  std::string to_line() const;
};

Metrics metrics_from_confusion(int tp, int fp, int fn, int tn);

}  // namespace kgalign

#endif
