#include "rmtnet/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmtnet/error.hpp"
#include "rmtnet/metrics.hpp"
#include "rmtnet/rng.hpp"

namespace rmt {

const std::array<const char*, CommunityFeatures::kDims>& CommunityFeatures::names() {
  static const std::array<const char*, kDims> kNames = {
      "size",           "degree_mean",  "degree_std",            "betweenness_mean",
      "betweenness_std", "assortativity", "clustering_coefficient", "radius"};
  return kNames;
}

CommunityFeatures community_feature_vector(const TradeNetwork& net,
                                           std::span<const int> members) {
  if (members.empty()) throw Error(Errc::NoData, "empty community");
  const TradeNetwork sub = induced_subgraph(net, members);

  CommunityFeatures f;
  f.size = sub.node_count();
  const DegreeStats deg = degree_stats(sub);
  f.degree_mean = deg.mean;
  f.degree_std = deg.stddev;
  const BetweennessResult btw = betweenness(sub);
  f.betweenness_mean = btw.mean;
  f.betweenness_std = btw.stddev;
  if (const auto r = degree_assortativity(sub)) {
    f.assortativity = *r;
    f.assortativity_defined = true;
  }
  f.clustering = clustering_coefficient(sub);
  f.diameter = diameter(sub);
  return f;
}

UserFeatures user_feature_vector(std::span<const PlayActivityRecord> records) {
  if (records.empty()) throw Error(Errc::NoData, "no play records for user");
  UserFeatures out;
  out.user_id = records.front().user_id;
  for (const PlayActivityRecord& rec : records) {
    if (rec.user_id != out.user_id) {
      throw Error(Errc::LengthMismatch, "records belong to different users");
    }
    for (std::size_t i = 0; i < out.f.size(); ++i) out.f[i] += rec.f[i];
    out.banned = out.banned || rec.banned;
  }
  return out;
}

Matrix zscore_standardize(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += m.at(r, c);
    if (m.rows > 0) mean /= static_cast<double>(m.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) {
      const double d = m.at(r, c) - mean;
      var += d * d;
    }
    if (m.rows > 0) var /= static_cast<double>(m.rows);
    const double std = std::sqrt(var);
    for (std::size_t r = 0; r < m.rows; ++r) {
      out.at(r, c) = std > 0.0 ? (m.at(r, c) - mean) / std : 0.0;
    }
  }
  return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

struct LloydRun {
  std::vector<int> assignment;
  Matrix centroids;
  double inertia = 0.0;
  int iterations = 0;
};

LloydRun lloyd_once(const Matrix& m, int k, Rng rng, int max_iter, double tol) {
  const std::size_t n = m.rows;
  const std::size_t cols = m.cols;
  Matrix centroids(static_cast<std::size_t>(k), cols);

  // k-means++ seeding
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  {
    const std::size_t first = rng.below(n);
    for (std::size_t c = 0; c < cols; ++c) centroids.at(0, c) = m.at(first, c);
    for (int centroid = 1; centroid < k; ++centroid) {
      double total = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d2 = sq_dist(m.row(r), centroids.row(static_cast<std::size_t>(centroid - 1)));
        min_d2[r] = std::min(min_d2[r], d2);
        total += min_d2[r];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        double x = rng.uniform() * total;
        for (std::size_t r = 0; r < n; ++r) {
          x -= min_d2[r];
          if (x < 0.0) {
            pick = r;
            break;
          }
          pick = r;
        }
      } else {
        pick = rng.below(n);
      }
      for (std::size_t c = 0; c < cols; ++c) {
        centroids.at(static_cast<std::size_t>(centroid), c) = m.at(pick, c);
      }
    }
  }

  LloydRun run;
  run.assignment.assign(n, 0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  Matrix next(static_cast<std::size_t>(k), cols);

  for (int iter = 1; iter <= max_iter; ++iter) {
    run.iterations = iter;
    // assignment step; ties go to the lowest centroid index
    run.inertia = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = sq_dist(m.row(r), centroids.row(static_cast<std::size_t>(c)));
        if (d2 < best) {
          best = d2;
          best_c = c;
        }
      }
      run.assignment[r] = best_c;
      run.inertia += best;
    }

    // repair empty clusters with the farthest assigned point
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t r = 0; r < n; ++r) ++counts[static_cast<std::size_t>(run.assignment[r])];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t r = 0; r < n; ++r) {
        const int rc = run.assignment[r];
        if (counts[static_cast<std::size_t>(rc)] <= 1) continue;  // keep donors non-empty
        const double d2 = sq_dist(m.row(r), centroids.row(static_cast<std::size_t>(rc)));
        if (d2 > far_d) {
          far_d = d2;
          farthest = r;
        }
      }
      if (far_d >= 0.0) {
        --counts[static_cast<std::size_t>(run.assignment[farthest])];
        run.assignment[farthest] = c;
        ++counts[static_cast<std::size_t>(c)];
      }
    }

    // update step
    std::fill(next.data.begin(), next.data.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto c = static_cast<std::size_t>(run.assignment[r]);
      for (std::size_t col = 0; col < cols; ++col) next.at(c, col) += m.at(r, col);
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto cz = static_cast<std::size_t>(c);
      if (counts[cz] == 0) continue;
      for (std::size_t col = 0; col < cols; ++col) {
        next.at(cz, col) /= static_cast<double>(counts[cz]);
        const double d = next.at(cz, col) - centroids.at(cz, col);
        shift += d * d;
        centroids.at(cz, col) = next.at(cz, col);
      }
    }
    if (std::sqrt(shift) < tol) break;
  }

  // final inertia against the converged centroids
  run.inertia = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    run.inertia += sq_dist(m.row(r), centroids.row(static_cast<std::size_t>(run.assignment[r])));
  }
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

ClusteringResult kmeans(const Matrix& m, int k, std::uint64_t seed, int max_iter, double tol,
                        int restarts) {
  if (k <= 0) throw Error(Errc::ConfigInvalid, "k must be positive");
  if (static_cast<std::size_t>(k) > m.rows) {
    throw Error(Errc::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                     std::to_string(m.rows) + " items");
  }
  const Rng base = Rng::seeded(seed);
  ClusteringResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    LloydRun run = lloyd_once(m, k, base.fork(static_cast<std::uint64_t>(r)), max_iter, tol);
    if (run.inertia < best.inertia) {
      best.assignments = std::move(run.assignment);
      best.centroids = std::move(run.centroids);
      best.inertia = run.inertia;
      best.iterations = run.iterations;
    }
  }
  best.k = k;
  best.seed = seed;
  return best;
}

ClusteringResult cluster_communities(const std::vector<CommunityFeatures>& features, int k,
                                     std::uint64_t seed) {
  Matrix m(features.size(), CommunityFeatures::kDims);
  for (std::size_t r = 0; r < features.size(); ++r) {
    const auto vec = features[r].vector();
    for (std::size_t c = 0; c < vec.size(); ++c) m.at(r, c) = vec[c];
  }
  return kmeans(zscore_standardize(m), k, seed);
}

ClusteringResult cluster_users(const std::vector<UserFeatures>& features, int k,
                               std::uint64_t seed) {
  Matrix m(features.size(), 16);
  for (std::size_t r = 0; r < features.size(); ++r) {
    for (std::size_t c = 0; c < 16; ++c) m.at(r, c) = features[r].f[c];
  }
  return kmeans(zscore_standardize(m), k, seed);
}

}  // namespace rmt
