#pragma once

#include <iosfwd>
#include <memory>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tensorformer/attention.hpp"
#include "tensorformer/mlp.hpp"
#include "tensorformer/oracle.hpp"
#include "tensorformer/sampling.hpp"
#include "tensorformer/voxelgrid.hpp"

namespace tensorformer {

// Reconstruction network: pointwise embedding, farthest-point downsampling
// with a learnable transfer layer, a stack of attention blocks on the coarse
// cloud, transfer back to the fine cloud, and a position-aware indicator
// layer with a sigmoid occupancy head.
struct NetworkConfig {
  std::vector<int64_t> block_dims{8, 32, 32, 32, 32};  // embedding dim, then block widths
  int64_t k = 24;
  int64_t downsample_to = 512;
  int64_t indicator_dim = 128;            // channel expansion before the head
  std::vector<int64_t> head_dims{32, 1};  // final MLP widths; must end at 1
  AttentionKind attention_kind = AttentionKind::NormalizedMatrix;
  int64_t attention_hidden = 16;  // hidden width of phi/psi/wnet
  int64_t transfer_hidden = 16;   // hidden width of the omega networks
  int64_t indicator_k = 0;        // neighbors per query; 0 = same as k

  void validate() const;
  std::map<std::string, std::string> to_meta() const;
  static NetworkConfig from_meta(const std::map<std::string, std::string>& meta);
};

struct TrainConfig {
  double learning_rate = 1e-4;  // cosine-decayed to zero
  int64_t iterations = 2000;
  int64_t batch_size = 1;
  double noise_std_fraction = 0.005;  // of the shape's max bounding-box side
  bool flip_augment = true;
  uint64_t seed = 0;
  int64_t surface_points = 3000;
  int64_t query_fine_res = 64;
  int64_t query_coarse_res = 16;
  int64_t query_budget = 0;            // cap on queries per sample; 0 = no cap
  bool resample_each_iteration = true;  // false: iteration 0's sample is reused

  void validate() const;
};

// Position-aware attention transfer, shared by the downsample transfer, the
// upsample transfer, and the query indicator: for each anchor of nbr,
// sum_j omega(anchor - p_nj) (.) f_nj over its source-cloud neighbors.
Tensor indicator_features(Tensor source_features, const Neighborhood& nbr, const Mlp& omega);

class Network {
 public:
  Network(NetworkConfig cfg, uint64_t param_seed);
  // Tensor handles point into the owned graph; the network must stay put.
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  static std::unique_ptr<Network> load_checkpoint(const std::string& path);
  void save_checkpoint(const std::string& path,
                       const std::map<std::string, std::string>& extra_meta = {}) const;

  Graph& graph() { return graph_; }
  const NetworkConfig& config() const { return cfg_; }

  // Per-point features for a normalized cloud; appends ops to the graph.
  Tensor backbone(const PointCloud& cloud);
  // Occupancy in (0,1) per query, [Q] tensor. fine_features must be [N x d_out].
  Tensor occupancy(const PointCloud& cloud, Tensor fine_features,
                   std::span<const Vec3> queries);
  // One attention block; exposed for unit tests.
  Tensor block_forward(int64_t block, Tensor features, const Neighborhood& nbr);

  // Forward-only evaluation in query batches; resets the graph.
  std::vector<double> predict(const PointCloud& normalized_cloud,
                              std::span<const Vec3> queries, int64_t batch_size = 8192);

  int64_t feature_dim() const { return cfg_.block_dims.back(); }

 private:
  struct Block {
    int64_t in_dim, out_dim;
    Mlp lin_in;                // single affine layer
    std::optional<Mlp> att;    // phi / psi / wnet, absent for ScalarDot
    Mlp lin_out;               // single affine layer
  };

  // Position-aware feature transfer (the indicator layer): for each anchor
  // of nbr, sum_j omega(anchor - p_nj) (.) f_nj.
  Tensor transfer(Tensor source_features, const Neighborhood& nbr, const Mlp& omega);

  NetworkConfig cfg_;
  Graph graph_;
  Mlp embed_, down_omega_, up_omega_, indicator_omega_, head_;
  std::vector<Block> blocks_;
};

// Occupancy at every cell center of the cloud's normalized bounding cube,
// returned in the input cloud's coordinate frame.
VoxelGrid predict_field(Network& net, const PointCloud& cloud, int64_t resolution);

// One training sample: noisy surface cloud plus labeled queries, both
// flipped (optionally) and normalized to the unit cube.
struct TrainSample {
  PointCloud cloud;
  std::vector<Vec3> queries;
  std::vector<real_t> labels;
  int flip_axis = -1;
  UnitCubeTransform transform;
};

TrainSample make_train_sample(const ShapeOracle& oracle, const TrainQuerySampler& sampler,
                              const TrainConfig& tc, Rng& rng);

struct TrainResult {
  std::vector<double> losses;
  std::vector<double> learning_rates;
  double final_loss = 0.0;
};

// Adam (beta 0.9/0.999, eps 1e-8) with cosine learning-rate decay. Fully
// reproducible from tc.seed; aborts with NumericError if the loss goes
// non-finite. log_csv, when given, receives "iteration,loss,lr" lines.
TrainResult train(Network& net, const std::vector<ShapeOracle>& shapes,
                  const TrainConfig& tc, std::ostream* log_csv = nullptr);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(Graph& g, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
  void step(double lr);

 private:
  Graph* graph_;
  double beta1_, beta2_, eps_;
  int64_t steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace tensorformer
