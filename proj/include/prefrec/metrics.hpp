#pragma once

#include <ostream>
#include <span>
#include <string>

#include "prefrec/policy/train.hpp"

namespace prefrec {

/// Formats a double the way every on-disk artifact does: shortest decimal
/// form that round-trips (to_chars general). NaN renders as the empty
/// string so unmeasured cells stay blank in CSV output.
std::string format_metric(double value);

/// Training metrics CSV: header then one line per row.
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

/// Offline evaluation summary, one line per scored policy.
struct EvalRow {
  std::string algo;
  std::string task;
  std::uint64_t seed = 0;
  double score = 0.0;
  double ci95 = 0.0;
  int users_scored = 0;
  int users_skipped = 0;
};
void write_eval_header(std::ostream& out);
void write_eval_row(std::ostream& out, const EvalRow& row);

/// Learning curve: simulator score vs training step with an across-user
/// spread column.
struct CurveRow {
  std::int64_t step = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};
void write_curve_header(std::ostream& out);
void write_curve_row(std::ostream& out, const CurveRow& row);

/// Dataset level histogram: fraction of sessions at each quantized level.
void write_levels_csv(std::ostream& out, std::span<const double> depth_fraction,
                      std::span<const double> frequency_fraction);

}  // namespace prefrec
