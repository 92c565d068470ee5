// Copyright 2026 The BMIML Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bmiml/metrics.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "bmiml/errors.h"
#include "bmiml/logging.h"

namespace bmiml {

namespace {

void check_shapes(const Matrix& a, const Matrix& truth, const char* metric) {
  require(a.rows() == truth.rows() && a.cols() == truth.cols(),
          ErrorKind::kDimensionMismatch,
          std::string(metric) + ": shape " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " vs truth " +
              std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
}

bool positive(const Matrix& truth, Index i, Index k) { return truth(i, k) > 0.5; }

void warn_skipped(const char* metric, Index skipped, Index total) {
  if (skipped > 0) {
    warn(std::string(metric) + ": skipped " + std::to_string(skipped) + " of " +
         std::to_string(total) + " bags with no usable labels");
  }
}

}  // namespace

double hamming_loss(const Matrix& predicted, const Matrix& truth) {
  check_shapes(predicted, truth, "hamming_loss");
  require(truth.size() > 0, ErrorKind::kInvalidArgument,
          "hamming_loss: empty label matrix");
  Index mismatches = 0;
  for (Index i = 0; i < truth.rows(); ++i)
    for (Index k = 0; k < truth.cols(); ++k)
      if ((predicted(i, k) > 0.5) != positive(truth, i, k)) ++mismatches;
  return static_cast<double>(mismatches) / static_cast<double>(truth.size());
}

double one_error(const Matrix& scores, const Matrix& truth) {
  check_shapes(scores, truth, "one_error");
  Index counted = 0, errors = 0;
  for (Index i = 0; i < truth.rows(); ++i) {
    if (truth.row(i).maxCoeff() < 0.5) continue;
    Index top = 0;
    for (Index k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, top)) top = k;
    ++counted;
    if (!positive(truth, i, top)) ++errors;
  }
  warn_skipped("one_error", truth.rows() - counted, truth.rows());
  return counted == 0 ? 0.0
                      : static_cast<double>(errors) / static_cast<double>(counted);
}

double ranking_loss(const Matrix& scores, const Matrix& truth) {
  check_shapes(scores, truth, "ranking_loss");
  Index counted = 0;
  double total = 0.0;
  for (Index i = 0; i < truth.rows(); ++i) {
    Index npos = 0;
    for (Index k = 0; k < truth.cols(); ++k) npos += positive(truth, i, k);
    const Index nneg = truth.cols() - npos;
    if (npos == 0 || nneg == 0) continue;
    double bad = 0.0;
    for (Index p = 0; p < truth.cols(); ++p) {
      if (!positive(truth, i, p)) continue;
      for (Index q = 0; q < truth.cols(); ++q) {
        if (positive(truth, i, q)) continue;
        if (scores(i, p) < scores(i, q)) bad += 1.0;
        else if (scores(i, p) == scores(i, q)) bad += 0.5;
      }
    }
    total += bad / static_cast<double>(npos * nneg);
    ++counted;
  }
  warn_skipped("ranking_loss", truth.rows() - counted, truth.rows());
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

double average_precision(const Matrix& scores, const Matrix& truth) {
  check_shapes(scores, truth, "average_precision");
  Index counted = 0;
  double total = 0.0;
  const Index k_count = truth.cols();
  std::vector<Index> rank(static_cast<std::size_t>(k_count));
  for (Index i = 0; i < truth.rows(); ++i) {
    if (truth.row(i).maxCoeff() < 0.5) continue;
    // rank(k) = 1 + number of classes placed ahead of k.
    for (Index k = 0; k < k_count; ++k) {
      Index ahead = 0;
      for (Index j = 0; j < k_count; ++j) {
        if (scores(i, j) > scores(i, k) || (scores(i, j) == scores(i, k) && j < k))
          ++ahead;
      }
      rank[static_cast<std::size_t>(k)] = ahead + 1;
    }
    double bag_sum = 0.0;
    Index npos = 0;
    for (Index k = 0; k < k_count; ++k) {
      if (!positive(truth, i, k)) continue;
      ++npos;
      Index at_or_above = 0;
      for (Index j = 0; j < k_count; ++j)
        if (positive(truth, i, j) &&
            rank[static_cast<std::size_t>(j)] <= rank[static_cast<std::size_t>(k)])
          ++at_or_above;
      bag_sum += static_cast<double>(at_or_above) /
                 static_cast<double>(rank[static_cast<std::size_t>(k)]);
    }
    total += bag_sum / static_cast<double>(npos);
    ++counted;
  }
  warn_skipped("average_precision", truth.rows() - counted, truth.rows());
  return counted == 0 ? 1.0 : total / static_cast<double>(counted);
}

MetricValues evaluate_predictions(const Matrix& predicted_labels,
                                  const Matrix& scores, const Matrix& truth) {
  return {hamming_loss(predicted_labels, truth), one_error(scores, truth),
          ranking_loss(scores, truth), average_precision(scores, truth)};
}

MetricsReport aggregate_folds(std::vector<MetricValues> per_fold,
                              bool sample_std) {
  require(!per_fold.empty(), ErrorKind::kInvalidArgument,
          "aggregate_folds: no folds");
  MetricsReport report;
  report.sample_std = sample_std;
  report.per_fold = std::move(per_fold);
  const double n = static_cast<double>(report.per_fold.size());
  auto stats = [&](double MetricValues::*field, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& f : report.per_fold) sum += f.*field;
    mean = sum / n;
    double ss = 0.0;
    for (const auto& f : report.per_fold) ss += (f.*field - mean) * (f.*field - mean);
    const double denom = sample_std ? std::max(1.0, n - 1.0) : n;
    sd = std::sqrt(ss / denom);
  };
  stats(&MetricValues::hamming_loss, report.mean.hamming_loss, report.std.hamming_loss);
  stats(&MetricValues::one_error, report.mean.one_error, report.std.one_error);
  stats(&MetricValues::ranking_loss, report.mean.ranking_loss, report.std.ranking_loss);
  stats(&MetricValues::average_precision, report.mean.average_precision,
        report.std.average_precision);
  return report;
}

namespace {

nlohmann::json values_json(const MetricValues& v) {
  return {{"hl", v.hamming_loss},
          {"oe", v.one_error},
          {"rl", v.ranking_loss},
          {"ap", v.average_precision}};
}

}  // namespace

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j = values_json(report.mean);
  j["std"] = values_json(report.std);
  j["std_kind"] = report.sample_std ? "sample" : "population";
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.per_fold) folds.push_back(values_json(f));
  j["per_fold"] = std::move(folds);
  if (!report.variant.empty()) j["variant"] = report.variant;
  if (report.split) {
    j["split"] = {{"train", report.split->train},
                  {"validation", report.split->validation},
                  {"test", report.split->test}};
  }
  return j;
}

std::string format_report_table(const MetricsReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %-18s %-18s %-18s %-18s\n", "",
                "HL (lower)", "OE (lower)", "RL (lower)", "AP (higher)");
  out += line;
  auto cell = [](double m, double s) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", m, s);
    return std::string(buf);
  };
  std::snprintf(line, sizeof(line), "%-8s %-18s %-18s %-18s %-18s\n",
                report.variant.empty() ? "result" : report.variant.c_str(),
                cell(report.mean.hamming_loss, report.std.hamming_loss).c_str(),
                cell(report.mean.one_error, report.std.one_error).c_str(),
                cell(report.mean.ranking_loss, report.std.ranking_loss).c_str(),
                cell(report.mean.average_precision, report.std.average_precision)
                    .c_str());
  out += line;
  return out;
}

}  // namespace bmiml
