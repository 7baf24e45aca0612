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

// Finite-trace detectors for the stability of a readout y_p = f(v_p) along a
// sampled sequence of determining vectors v_p in [0,1]^n.
//
// Asymptotic notions are approximated on a tail window of W samples:
//   - stability: the last W readouts stay inside a tube of half-width
//     epsilon around their mean (or a supplied limit c);
//   - anchors: coordinates whose last W values oscillate by at most a
//     tolerance;
//   - "infinitely often": at least m visits within the tail.

#ifndef SFT_DYNAMICS_HPP_
#define SFT_DYNAMICS_HPP_

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

namespace sft {

using Readout = std::function<double(const Eigen::VectorXd&)>;
using Region = std::function<bool(const Eigen::VectorXd&)>;

class SequenceTrace {
 public:
  // `samples` holds one determining vector per row. Every coordinate must lie
  // in [0,1]; `readouts`, when given, must have one entry per row.
  explicit SequenceTrace(Eigen::MatrixXd samples,
                         std::optional<Eigen::VectorXd> readouts = std::nullopt);

  // Samples with readouts computed as f(v_p).
  static SequenceTrace with_readout(Eigen::MatrixXd samples, const Readout& f);

  [[nodiscard]] std::size_t length() const noexcept {
    return static_cast<std::size_t>(samples_.rows());
  }
  [[nodiscard]] std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(samples_.cols());
  }
  [[nodiscard]] const Eigen::MatrixXd& samples() const noexcept { return samples_; }
  [[nodiscard]] bool has_readouts() const noexcept { return readouts_.has_value(); }

  // Throws MissingReadouts when absent.
  [[nodiscard]] const Eigen::VectorXd& readouts() const;

  [[nodiscard]] Eigen::VectorXd sample(std::size_t p) const {
    return samples_.row(static_cast<Eigen::Index>(p)).transpose();
  }

 private:
  Eigen::MatrixXd samples_;
  std::optional<Eigen::VectorXd> readouts_;
};

// max(len / 4, 8).
std::size_t default_tail_window(std::size_t length) noexcept;

struct StabilityVerdict {
  bool stable = false;
  double limit = 0.0;  // c
  double epsilon = 0.0;
  // First index from which every later readout stays in [c - eps, c + eps];
  // empty when the final readout is already outside.
  std::optional<std::size_t> tail_start;
  std::size_t tube_violations = 0;  // readouts outside the tube, whole trace
};

// Requires length >= 2W. `c` defaults to the mean of the last W readouts.
StabilityVerdict stability_assess(const SequenceTrace& trace, double epsilon,
                                  std::size_t tail_window,
                                  std::optional<double> c = std::nullopt);

struct CoordinateAnchor {
  bool converged = false;
  double limit = 0.0;        // tail mean
  double oscillation = 0.0;  // max - min over the tail
};

struct AnchorReport {
  double tolerance = 0.0;
  std::size_t tail_window = 0;
  std::vector<CoordinateAnchor> coordinates;

  [[nodiscard]] bool any_converged() const noexcept;
  [[nodiscard]] bool all_converged() const noexcept;
};

AnchorReport anchor_detect(const SequenceTrace& trace, double tolerance,
                           std::size_t tail_window);

struct SeparationResult {
  bool nonconvergent = false;
  std::size_t visits_a = 0;
  std::size_t visits_b = 0;
  // min |y_a - y_b| over visited a in A, b in B; +inf when a side is unvisited
  double observed_gap = 0.0;
  bool separated = false;  // observed_gap >= delta
};

// Flags nonconvergence when the tail visits both A and B at least
// `min_visits` times and the visited readouts of A and B stay `delta` apart.
// The tail defaults to the second half of the trace.
SeparationResult separation_check(const SequenceTrace& trace, const Region& set_a,
                                  const Region& set_b, double delta,
                                  std::size_t min_visits = 3,
                                  std::optional<std::size_t> tail = std::nullopt);

// Smallest p such that |y_q - c| <= epsilon for every q >= p.
std::optional<std::size_t> confinement_check(const SequenceTrace& trace, double c,
                                             double epsilon);

struct Cluster {
  Eigen::VectorXd center;  // the tail sample that opened the ball
  std::size_t visits = 0;
};

// Greedy max-norm ball covering of the last W samples. Each sample joins the
// first existing ball whose center is within `radius`, otherwise it opens a
// new ball. Clusters are ordered by visit count, ties by opening order.
std::vector<Cluster> cluster_estimate(const SequenceTrace& trace, double radius,
                                      std::optional<std::size_t> tail_window =
                                          std::nullopt);

// Comma-separated rows, one sample per row. An optional header row whose last
// cell is "y" marks the final column as precomputed readouts; without a
// header, `readout_column` decides.
SequenceTrace read_trace_csv(std::istream& in, bool readout_column = false);
void write_trace_csv(std::ostream& out, const SequenceTrace& trace);

}  // namespace sft

#endif  // SFT_DYNAMICS_HPP_
