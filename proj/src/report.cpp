#include "idps/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "idps/kdd.hpp"
#include "idps/text_io.hpp"

namespace idps {

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  for (int a = 0; a < cm.classes(); ++a) {
    for (int p = 0; p < cm.classes(); ++p) os << (p ? "," : "") << cm(a, p);
    os << '\n';
  }
  return os.str();
}

std::string roc_csv(const RocCurve& curve) {
  std::ostringstream os;
  os << "fpr,tpr,threshold\n";
  for (const auto& p : curve.points) {
    os << text::format_double(p.fpr) << ',' << text::format_double(p.tpr) << ','
       << (std::isinf(p.threshold) ? std::string("inf") : text::format_double(p.threshold)) << '\n';
  }
  return os.str();
}

std::string summary_csv(std::span<const EvaluationReport> reports) {
  std::ostringstream os;
  os << "partition,mse,success_rate,failure_rate,tp,fp,fn,tn\n";
  for (const auto& r : reports) {
    os << r.partition << ',' << text::format_double(r.mse) << ','
       << text::format_double(r.rates.success) << ',' << text::format_double(r.rates.failure) << ','
       << r.alarms.tp << ',' << r.alarms.fp << ',' << r.alarms.fn << ',' << r.alarms.tn << '\n';
  }
  return os.str();
}

std::string evaluation_text(std::span<const EvaluationReport> reports) {
  std::ostringstream os;
  os << std::fixed;
  for (const auto& r : reports) {
    const int k = r.confusion.classes();
    os << "== " << r.partition << " (" << r.samples << " samples)\n";
    os << std::setw(12) << "actual\\pred";
    for (int c = 0; c < k; ++c) os << std::setw(9) << class_name(c);
    os << '\n';
    for (int a = 0; a < k; ++a) {
      os << std::setw(12) << class_name(a);
      for (int p = 0; p < k; ++p) os << std::setw(9) << r.confusion(a, p);
      os << '\n';
    }
    os << std::setprecision(4) << "success " << 100.0 * r.rates.success << "%  failure "
       << 100.0 * r.rates.failure << "%  mse " << std::setprecision(6) << r.mse << '\n';
    os << "alarms  tp " << r.alarms.tp << "  fp " << r.alarms.fp << "  fn " << r.alarms.fn
       << "  tn " << r.alarms.tn << '\n';
    if (r.attack_roc) os << std::setprecision(4) << "attack-vs-normal auc " << r.attack_roc->auc << '\n';
    os << '\n';
  }
  return os.str();
}

void write_evaluation(const std::filesystem::path& dir, std::span<const EvaluationReport> reports) {
  for (const auto& r : reports)
    text::write_file_atomic(dir / ("confusion_" + r.partition + ".csv"), confusion_csv(r.confusion));
  text::write_file_atomic(dir / "summary.csv", summary_csv(reports));
}

void write_roc(const std::filesystem::path& dir, const EvaluationReport& report) {
  for (std::size_t c = 0; c < report.class_roc.size(); ++c) {
    if (report.class_roc[c])
      text::write_file_atomic(dir / ("roc_class" + std::to_string(c) + ".csv"),
                              roc_csv(*report.class_roc[c]));
  }
  if (report.attack_roc) text::write_file_atomic(dir / "roc_attack.csv", roc_csv(*report.attack_roc));
}

}  // namespace idps
