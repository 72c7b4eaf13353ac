#include "prefrec/metrics.hpp"

#include <charconv>
#include <cmath>

#include "prefrec/errors.hpp"

namespace prefrec {

std::string format_metric(double value) {
  if (std::isnan(value)) return "";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw IoError("format_metric: value does not fit");
  return std::string(buf, ptr);
}

void write_metrics_header(std::ostream& out) {
  out << "epoch,step,v_loss,q_loss,policy_loss,reward_loss,eval_score\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  out << row.epoch << ',' << row.step << ',' << format_metric(row.v_loss) << ','
      << format_metric(row.q_loss) << ',' << format_metric(row.policy_loss) << ','
      << format_metric(row.reward_loss) << ',' << format_metric(row.eval_score) << '\n';
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  write_metrics_header(out);
  for (const MetricsRow& row : rows) write_metrics_row(out, row);
}

void write_eval_header(std::ostream& out) {
  out << "algo,task,seed,score,ci95,users_scored,users_skipped\n";
}

void write_eval_row(std::ostream& out, const EvalRow& row) {
  out << row.algo << ',' << row.task << ',' << row.seed << ',' << format_metric(row.score) << ','
      << format_metric(row.ci95) << ',' << row.users_scored << ',' << row.users_skipped << '\n';
}

void write_curve_header(std::ostream& out) { out << "step,mean,stderr\n"; }

void write_curve_row(std::ostream& out, const CurveRow& row) {
  out << row.step << ',' << format_metric(row.mean) << ',' << format_metric(row.stderr_) << '\n';
}

void write_levels_csv(std::ostream& out, std::span<const double> depth_fraction,
                      std::span<const double> frequency_fraction) {
  if (depth_fraction.size() != frequency_fraction.size()) {
    throw IoError("write_levels_csv: histogram size mismatch");
  }
  out << "level,depth_fraction,frequency_fraction\n";
  for (std::size_t i = 0; i < depth_fraction.size(); ++i) {
    out << i << ',' << format_metric(depth_fraction[i]) << ','
        << format_metric(frequency_fraction[i]) << '\n';
  }
}

}  // namespace prefrec
