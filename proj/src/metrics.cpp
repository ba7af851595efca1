#include "kgalign/metrics.hpp"

#include <sstream>

namespace kgalign {

Metrics metrics_from_confusion(int tp, int fp, int fn, int tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  int n = m.total();
  m.accuracy = n == 0 ? 0.0 : static_cast<double>(tp + tn) / n;
  m.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  m.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

std::string Metrics::to_line() const {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << "acc " << accuracy << "  prec " << precision << "  rec " << recall
     << "  f1 " << f1 << "  (tp " << tp << " fp " << fp << " fn " << fn << " tn " << tn << ")";
  return os.str();
}

}  // namespace kgalign
