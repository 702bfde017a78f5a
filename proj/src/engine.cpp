#include "idps/engine.hpp"

#include <iomanip>
#include <istream>
#include <sstream>

#include "idps/error.hpp"
#include "idps/text_io.hpp"

namespace idps {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::allow: return "allow";
    case Action::alert: return "alert";
    case Action::block: return "block";
  }
  return "unknown";
}

Policy Policy::standard() {
  Policy p;
  p.action_of = {Action::allow, Action::block, Action::block,
                 Action::block, Action::block, Action::alert};
  return p;
}

Action decide(ClassId predicted, const Policy& policy) {
  if (predicted < 0 || predicted >= kClassCount)
    throw RangeError("no policy entry for class " + std::to_string(predicted));
  return policy.action_of[static_cast<std::size_t>(predicted)];
}

std::string format_verdict(const Verdict& v) {
  std::ostringstream os;
  os << v.record_index << ',' << (v.predicted ? *v.predicted : -1) << ',' << action_name(v.action);
  os << std::fixed << std::setprecision(6);
  for (double s : v.scores) {
    if (v.predicted) {
      os << ',' << s;
    } else {
      os << ",nan";
    }
  }
  return os.str();
}

std::string StreamSummary::to_text() const {
  std::ostringstream os;
  os << "records " << records << "  malformed " << malformed << '\n';
  os << "actions  allow " << actions[0] << "  alert " << actions[1] << "  block " << actions[2]
     << '\n';
  os << "predicted";
  for (int c = 0; c < kClassCount; ++c)
    os << "  " << class_name(c) << ' ' << predicted[static_cast<std::size_t>(c)];
  os << '\n';
  if (labelled > 0) {
    os << "labelled " << labelled << "  correct " << correct << "  accuracy " << std::fixed
       << std::setprecision(4) << static_cast<double>(correct) / static_cast<double>(labelled)
       << '\n';
    os << "alarms  tp " << alarms.tp << "  fp " << alarms.fp << "  fn " << alarms.fn << "  tn "
       << alarms.tn << '\n';
  }
  return os.str();
}

StreamSummary process_stream(std::istream& in, const TrainedModel& model, const Policy& policy,
                             const VerdictSink& sink) {
  StreamSummary summary;
  Workspace ws(model.network.layout);
  std::string line;
  std::uint64_t sequence = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    Verdict v;
    v.record_index = summary.records++;
    v.sequence = sequence++;
    try {
      const auto rec = parse_stream_record(line);
      if (rec.label) v.actual = map_attack(*rec.label, model.taxonomy);
      const auto x = model.prepare(rec.features);
      forward_into(model.network, x, ws);
      const auto y = ws.output();
      std::copy(y.begin(), y.end(), v.scores.begin());
      v.predicted = argmax(y);
      v.action = decide(*v.predicted, policy);
    } catch (const Error& e) {
      v.predicted.reset();
      v.actual.reset();
      v.scores.fill(0.0);
      v.action = Action::alert;
      v.error = e.what();
    }

    summary.actions[static_cast<std::size_t>(v.action)]++;
    if (!v.predicted) {
      ++summary.malformed;
    } else {
      summary.predicted[static_cast<std::size_t>(*v.predicted)]++;
      if (v.actual) {
        ++summary.labelled;
        summary.correct += *v.actual == *v.predicted;
        summary.alarms.add(alarm_outcome(*v.predicted, *v.actual));
      }
    }
    if (sink) sink(v);
  }
  return summary;
}

}  // namespace idps
