// Copyright 2026 The SFT Authors.
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

#include "sft/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "sft/error.hpp"
#include "sft/matrix_io.hpp"

namespace sft {

SequenceTrace::SequenceTrace(Eigen::MatrixXd samples,
                             std::optional<Eigen::VectorXd> readouts)
    : samples_(std::move(samples)), readouts_(std::move(readouts)) {
  for (Eigen::Index p = 0; p < samples_.rows(); ++p) {
    for (Eigen::Index i = 0; i < samples_.cols(); ++i) {
      const double v = samples_(p, i);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(Errc::OutOfRange,
                    fmt::format("sample {} coordinate {} = {} outside [0,1]", p, i, v));
      }
    }
  }
  if (readouts_ && readouts_->size() != samples_.rows()) {
    throw Error(Errc::LengthMismatch,
                fmt::format("{} readouts for {} samples", readouts_->size(),
                            samples_.rows()));
  }
}

SequenceTrace SequenceTrace::with_readout(Eigen::MatrixXd samples, const Readout& f) {
  Eigen::VectorXd y(samples.rows());
  for (Eigen::Index p = 0; p < samples.rows(); ++p) {
    y(p) = f(samples.row(p).transpose());
  }
  return SequenceTrace(std::move(samples), std::move(y));
}

const Eigen::VectorXd& SequenceTrace::readouts() const {
  if (!readouts_) throw Error(Errc::MissingReadouts, "trace has no readouts");
  return *readouts_;
}

std::size_t default_tail_window(std::size_t length) noexcept {
  return std::max<std::size_t>(length / 4, 8);
}

namespace {

void require_length(const SequenceTrace& trace, std::size_t tail_window) {
  if (tail_window == 0) {
    throw Error(Errc::InvalidArgument, "tail window must be positive");
  }
  if (trace.length() < 2 * tail_window) {
    throw Error(Errc::TraceTooShort,
                fmt::format("trace of length {} needs at least {} samples",
                            trace.length(), 2 * tail_window));
  }
}

}  // namespace

StabilityVerdict stability_assess(const SequenceTrace& trace, double epsilon,
                                  std::size_t tail_window, std::optional<double> c) {
  require_length(trace, tail_window);
  if (!(epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be >= 0");
  const auto& y = trace.readouts();
  const auto w = static_cast<Eigen::Index>(tail_window);
  const auto tail = y.tail(w);

  StabilityVerdict v;
  v.epsilon = epsilon;
  v.limit = c.value_or(tail.mean());
  v.stable = (tail.array() - v.limit).abs().maxCoeff() <= epsilon;
  v.tail_start = confinement_check(trace, v.limit, epsilon);
  for (Eigen::Index p = 0; p < y.size(); ++p) {
    if (std::abs(y(p) - v.limit) > epsilon) ++v.tube_violations;
  }
  return v;
}

bool AnchorReport::any_converged() const noexcept {
  return std::any_of(coordinates.begin(), coordinates.end(),
                     [](const CoordinateAnchor& a) { return a.converged; });
}

bool AnchorReport::all_converged() const noexcept {
  return std::all_of(coordinates.begin(), coordinates.end(),
                     [](const CoordinateAnchor& a) { return a.converged; });
}

AnchorReport anchor_detect(const SequenceTrace& trace, double tolerance,
                           std::size_t tail_window) {
  require_length(trace, tail_window);
  AnchorReport report{tolerance, tail_window, {}};
  const auto tail = trace.samples().bottomRows(static_cast<Eigen::Index>(tail_window));
  for (Eigen::Index i = 0; i < tail.cols(); ++i) {
    const auto col = tail.col(i);
    CoordinateAnchor a;
    a.oscillation = col.maxCoeff() - col.minCoeff();
    a.limit = col.mean();
    a.converged = a.oscillation <= tolerance;
    report.coordinates.push_back(a);
  }
  return report;
}

SeparationResult separation_check(const SequenceTrace& trace, const Region& set_a,
                                  const Region& set_b, double delta,
                                  std::size_t min_visits,
                                  std::optional<std::size_t> tail) {
  const auto& y = trace.readouts();
  const std::size_t len = trace.length();
  const std::size_t window = std::min(tail.value_or(len - len / 2), len);

  std::vector<double> ya;
  std::vector<double> yb;
  for (std::size_t p = len - window; p < len; ++p) {
    const Eigen::VectorXd v = trace.sample(p);
    const double yp = y(static_cast<Eigen::Index>(p));
    if (set_a(v)) ya.push_back(yp);
    if (set_b(v)) yb.push_back(yp);
  }

  SeparationResult r;
  r.visits_a = ya.size();
  r.visits_b = yb.size();
  r.observed_gap = std::numeric_limits<double>::infinity();
  if (!ya.empty() && !yb.empty()) {
    // min over the product is attained at the closest pair of sorted values
    std::sort(ya.begin(), ya.end());
    std::sort(yb.begin(), yb.end());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ya.size() && j < yb.size()) {
      r.observed_gap = std::min(r.observed_gap, std::abs(ya[i] - yb[j]));
      if (ya[i] < yb[j]) ++i; else ++j;
    }
  }
  r.separated = r.observed_gap >= delta;
  r.nonconvergent = r.visits_a >= min_visits && r.visits_b >= min_visits && r.separated;
  return r;
}

std::optional<std::size_t> confinement_check(const SequenceTrace& trace, double c,
                                             double epsilon) {
  const auto& y = trace.readouts();
  std::optional<std::size_t> start;
  for (Eigen::Index p = y.size() - 1; p >= 0; --p) {
    if (std::abs(y(p) - c) > epsilon) break;
    start = static_cast<std::size_t>(p);
  }
  return start;
}

std::vector<Cluster> cluster_estimate(const SequenceTrace& trace, double radius,
                                      std::optional<std::size_t> tail_window) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "radius must be positive");
  const std::size_t len = trace.length();
  const std::size_t w = std::min(tail_window.value_or(default_tail_window(len)), len);

  std::vector<Cluster> clusters;
  for (std::size_t p = len - w; p < len; ++p) {
    const Eigen::VectorXd v = trace.sample(p);
    auto hit = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return (c.center - v).lpNorm<Eigen::Infinity>() <= radius;
    });
    if (hit == clusters.end()) {
      clusters.push_back({v, 1});
    } else {
      ++hit->visits;
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) { return a.visits > b.visits; });
  return clusters;
}

SequenceTrace read_trace_csv(std::istream& in, bool readout_column) {
  auto rows = read_csv_rows(in);
  if (!rows.empty() && !rows.front().empty()) {
    bool header = false;
    for (const auto& cell : rows.front()) {
      if (!parse_double(cell).has_value()) header = true;
    }
    if (header) {
      std::string last = rows.front().back();
      std::transform(last.begin(), last.end(), last.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      readout_column = last == "y";
      rows.erase(rows.begin());
    }
  }
  if (rows.empty()) return SequenceTrace(Eigen::MatrixXd(0, 0));

  const std::size_t width = rows.front().size();
  const std::size_t dim = readout_column ? width - 1 : width;
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(dim));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw Error(Errc::ParseError,
                  fmt::format("trace row {} has {} cells, expected {}", r + 1,
                              rows[r].size(), width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = parse_double(rows[r][c]);
      if (!v) {
        throw Error(Errc::ParseError,
                    fmt::format("trace row {} cell {} is not a number", r + 1, c + 1));
      }
      if (c < dim) {
        samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
      } else {
        y(static_cast<Eigen::Index>(r)) = *v;
      }
    }
  }
  if (readout_column) return SequenceTrace(std::move(samples), std::move(y));
  return SequenceTrace(std::move(samples));
}

void write_trace_csv(std::ostream& out, const SequenceTrace& trace) {
  for (std::size_t i = 0; i < trace.dimension(); ++i) {
    out << (i ? "," : "") << "v" << i + 1;
  }
  if (trace.has_readouts()) out << ",y";
  out << '\n';
  for (std::size_t p = 0; p < trace.length(); ++p) {
    const auto r = static_cast<Eigen::Index>(p);
    for (Eigen::Index i = 0; i < trace.samples().cols(); ++i) {
      out << (i ? "," : "") << fmt::format("{}", trace.samples()(r, i));
    }
    if (trace.has_readouts()) out << ',' << fmt::format("{}", trace.readouts()(r));
    out << '\n';
  }
}

}  // namespace sft
