// Copyright 2026 The dimdrop Authors
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

#include "dimdrop/phases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "dimdrop/errors.hpp"

namespace dimdrop {

double circular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

namespace {

// Within a cluster of (numerically) equal eigenvalues the eigensolver's
// basis is an arbitrary rotation of the eigenspace, so overlaps against the
// incoming tracks carry no signal.  Replace each cluster basis by the
// rotation of it that best matches the previous track vectors (the unitary
// polar factor of the overlap block).  This keeps a conjugate pair of
// tracks apart when a rotation block passes through -1 exactly.
void align_degenerate_clusters(const CMat& prev_vectors, const RVec& fresh,
                               CMat* fresh_vectors) {
  const int n = static_cast<int>(fresh.size());
  if (n < 2) return;
  constexpr double kClusterGap = 1e-10;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return fresh[a] < fresh[b]; });

  // Split the sorted phases into maximal runs of near-equal values on the
  // circle.  Rotating the scan to a genuine gap glues a run spanning the
  // +-pi cut; if no gap exists the whole spectrum is one cluster.
  int start = -1;
  for (int i = 0; i < n; ++i) {
    const int before = (i + n - 1) % n;
    if (circular_distance(fresh[order[before]], fresh[order[i]]) >=
        kClusterGap) {
      start = i;
      break;
    }
  }
  std::vector<std::vector<int>> clusters;
  if (start < 0) {
    clusters.push_back(order);
  } else {
    std::vector<int> run = {order[start]};
    for (int step = 1; step < n; ++step) {
      const int here = order[(start + step) % n];
      const int before = order[(start + step - 1) % n];
      if (circular_distance(fresh[before], fresh[here]) < kClusterGap) {
        run.push_back(here);
      } else {
        clusters.push_back(std::move(run));
        run = {here};
      }
    }
    clusters.push_back(std::move(run));
  }

  for (const std::vector<int>& cluster : clusters) {
    const int c = static_cast<int>(cluster.size());
    if (c < 2) continue;
    CMat span(fresh_vectors->rows(), c);
    for (int j = 0; j < c; ++j) span.col(j) = fresh_vectors->col(cluster[j]);

    // The tracks continuing into the cluster are the ones whose vectors
    // already lie (mostly) inside its span.
    std::vector<std::pair<double, int>> weights(n);
    for (int k = 0; k < n; ++k) {
      weights[k] = {-(span.adjoint() * prev_vectors.col(k)).squaredNorm(), k};
    }
    std::sort(weights.begin(), weights.end());
    if (-weights[c - 1].first <= 0.5) continue;  // continuation unidentified

    CMat incoming(prev_vectors.rows(), c);
    for (int j = 0; j < c; ++j) {
      incoming.col(j) = prev_vectors.col(weights[j].second);
    }
    const CMat block = incoming.adjoint() * span;
    Eigen::JacobiSVD<CMat> svd(block,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
    const CMat rotated =
        span * (svd.matrixV() * svd.matrixU().adjoint());
    for (int j = 0; j < c; ++j) fresh_vectors->col(cluster[j]) = rotated.col(j);
  }
}

// One unwrap step: match the principal phases `fresh` (with eigenvectors in
// `fresh_vectors`) onto the previous tracks, returning the new unwrapped
// values and the eigenvector columns permuted into track order.  Tracks
// follow their eigenvectors -- greedy on the largest squared overlap
// |<prev_k, fresh_l>|^2 -- because phase distance alone cannot separate two
// tracks whose lifts differ by a full turn when they cross on the circle.
// Deterministic because ties break on (track, eigen-index).
void step_tracks(const RVec& prev, const CMat& prev_vectors, const RVec& fresh,
                 const CMat& fresh_vectors, double ambiguity, RVec* next,
                 CMat* next_vectors) {
  const int n = static_cast<int>(prev.size());
  CMat aligned = fresh_vectors;
  align_degenerate_clusters(prev_vectors, fresh, &aligned);

  std::vector<std::tuple<double, int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const double overlap =
          std::norm(prev_vectors.col(k).dot(aligned.col(l)));
      pairs.emplace_back(-overlap, k, l);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  next->resize(n);
  next_vectors->resize(aligned.rows(), n);
  std::vector<bool> track_used(n, false), eigen_used(n, false);
  int assigned = 0;
  for (const auto& [neg_overlap, k, l] : pairs) {
    if (track_used[k] || eigen_used[l]) continue;
    const double dist = circular_distance(prev[k], fresh[l]);
    if (dist >= ambiguity) {
      throw UnwrapFailureError(
          "eigenphase step " + std::to_string(dist) +
          " reaches the ambiguity threshold " + std::to_string(ambiguity) +
          "; refine the grid");
    }
    // A weak overlap after cluster alignment means the continuation truly
    // mixes tracks.  Harmless when every plausible partner sits on the same
    // lift branch; ill-posed when branches differ by a full turn, so refuse
    // rather than jump the logarithm silently.
    if (-neg_overlap <= 0.5) {
      for (int k2 = 0; k2 < n; ++k2) {
        if (k2 == k) continue;
        if (circular_distance(prev[k2], fresh[l]) < ambiguity &&
            std::abs(prev[k2] - prev[k]) >= std::numbers::pi) {
          throw UnwrapFailureError(
              "eigenphase tracks collide with lifts a full turn apart "
              "(lifts " + std::to_string(prev[k]) + " and " +
              std::to_string(prev[k2]) + ", overlap " +
              std::to_string(-neg_overlap) + "); refine the grid");
        }
      }
    }
    // Signed principal difference moves the track continuously.
    const double delta = std::remainder(fresh[l] - prev[k], 2.0 * std::numbers::pi);
    (*next)[k] = prev[k] + delta;
    next_vectors->col(k) = aligned.col(l);
    track_used[k] = true;
    eigen_used[l] = true;
    if (++assigned == n) break;
  }
}

CMat log_from(const RVec& phases, const CMat& vectors) {
  const cplx iu(0.0, 1.0);
  CVec diag = iu * phases.cast<cplx>();
  CMat l = vectors * diag.asDiagonal() * vectors.adjoint();
  // Project onto skew-Hermitian so exp_skew accepts the result exactly.
  return 0.5 * (l - CMat(l.adjoint()));
}

}  // namespace

PhaseTracks unwrap_path(const std::vector<CMat>& samples, double ambiguity) {
  if (samples.empty()) throw SizeMismatchError("unwrap needs samples");
  PhaseTracks tracks;
  tracks.phases.reserve(samples.size());
  tracks.vectors.reserve(samples.size());

  UnitaryEigensystem first = eig_unitary(samples[0]);
  tracks.phases.push_back(first.phases);
  tracks.vectors.push_back(first.vectors);

  for (size_t s = 1; s < samples.size(); ++s) {
    UnitaryEigensystem eig = eig_unitary(samples[s]);
    RVec next;
    CMat next_vectors;
    step_tracks(tracks.phases.back(), tracks.vectors.back(), eig.phases,
                eig.vectors, ambiguity, &next, &next_vectors);
    tracks.phases.push_back(std::move(next));
    tracks.vectors.push_back(std::move(next_vectors));
  }
  return tracks;
}

PhaseTracks unwrap_loop(const std::vector<CMat>& samples, double ambiguity,
                        double closure_tol) {
  std::vector<CMat> extended = samples;
  extended.push_back(samples[0]);
  PhaseTracks tracks = unwrap_path(extended, ambiguity);

  // Going around the loop must reproduce the starting logarithm; any track
  // that picked up a net 2*pi (or came back on the wrong branch) leaves an
  // operator-norm gap of order 2*pi here.
  const CMat l_start = log_from(tracks.phases.front(), tracks.vectors.front());
  const CMat l_end = log_from(tracks.phases.back(), tracks.vectors.back());
  const double closure = operator_norm(l_end - l_start);
  if (closure > closure_tol) {
    throw UnwrapFailureError("loop logarithm fails to close: defect " +
                             std::to_string(closure) + " exceeds " +
                             std::to_string(closure_tol));
  }
  tracks.phases.pop_back();
  tracks.vectors.pop_back();
  return tracks;
}

std::vector<CMat> tracks_to_logs(const PhaseTracks& tracks) {
  std::vector<CMat> logs;
  logs.reserve(tracks.phases.size());
  for (size_t s = 0; s < tracks.phases.size(); ++s) {
    logs.push_back(log_from(tracks.phases[s], tracks.vectors[s]));
  }
  return logs;
}

}  // namespace dimdrop
