#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmtnet/graph.hpp"
#include "rmtnet/ingest.hpp"

namespace rmt {

/// The structural statistics of one community's induced subgraph.
/// Undefined assortativity (or path-dependent stats on degenerate graphs)
/// is encoded as 0 with the flag cleared.
struct CommunityFeatures {
  int size = 0;
  double degree_mean = 0.0;
  double degree_std = 0.0;
  double betweenness_mean = 0.0;
  double betweenness_std = 0.0;
  double assortativity = 0.0;
  bool assortativity_defined = false;
  double clustering = 0.0;
  double diameter = 0.0;  // the paper-style "radius"

  static constexpr int kDims = 8;
  std::array<double, kDims> vector() const {
    return {static_cast<double>(size), degree_mean,   degree_std, betweenness_mean,
            betweenness_std,           assortativity, clustering, diameter};
  }
  static const std::array<const char*, kDims>& names();
};

CommunityFeatures community_feature_vector(const TradeNetwork& net, std::span<const int> members);

struct UserFeatures {
  std::string user_id;
  std::array<double, 16> f{};
  bool banned = false;  // true if any weekly record carries the flag
};

/// Element-wise sum of one user's weekly records. Throws NoData on empty
/// input and LengthMismatch if records belong to different users.
UserFeatures user_feature_vector(std::span<const PlayActivityRecord> records);

/// Row-major dense matrix, rows = items.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Column-wise (x - mean) / std with population std; zero-variance
/// columns become all zeros.
Matrix zscore_standardize(const Matrix& m);

struct ClusteringResult {
  std::vector<int> assignments;
  Matrix centroids;  // k x cols, in the input (standardized) space
  double inertia = 0.0;
  int k = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
};

/// k-means++ / Lloyd with `restarts` seeded restarts, keeping the best
/// inertia. Empty clusters are repaired by stealing the point farthest
/// from its centroid. Throws KTooLarge when k exceeds the row count.
ClusteringResult kmeans(const Matrix& m, int k, std::uint64_t seed, int max_iter = 300,
                        double tol = 1e-6, int restarts = 10);

/// Standardize then cluster; k defaults to the five community types.
ClusteringResult cluster_communities(const std::vector<CommunityFeatures>& features, int k,
                                     std::uint64_t seed);

/// Standardize then cluster; k defaults to the seven play styles.
ClusteringResult cluster_users(const std::vector<UserFeatures>& features, int k,
                               std::uint64_t seed);

}  // namespace rmt
