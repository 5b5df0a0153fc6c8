#include "tensorformer/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "tensorformer/checkpoint.hpp"

namespace tensorformer {

namespace {

std::string join_ints(const std::vector<int64_t>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<int64_t> split_ints(const std::string& s) {
  std::vector<int64_t> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoll(tok));
  return out;
}

}  // namespace

void NetworkConfig::validate() const {
  if (block_dims.size() < 2)
    throw ConfigError("network: block_dims needs the embedding dim plus at least one block");
  for (int64_t d : block_dims)
    if (d < 1) throw ConfigError("network: nonpositive block dim");
  if (k < 1) throw ConfigError("network: k must be >= 1");
  if (downsample_to < 1) throw ConfigError("network: downsample_to must be >= 1");
  if (indicator_dim < 1) throw ConfigError("network: indicator_dim must be >= 1");
  if (head_dims.empty() || head_dims.back() != 1)
    throw ConfigError("network: head_dims must end at width 1");
  if (attention_hidden < 1 || transfer_hidden < 1)
    throw ConfigError("network: hidden widths must be >= 1");
  if (indicator_k < 0) throw ConfigError("network: indicator_k must be >= 0");
}

std::map<std::string, std::string> NetworkConfig::to_meta() const {
  return {
      {"block_dims", join_ints(block_dims)},
      {"k", std::to_string(k)},
      {"downsample_to", std::to_string(downsample_to)},
      {"indicator_dim", std::to_string(indicator_dim)},
      {"head_dims", join_ints(head_dims)},
      {"attention", to_string(attention_kind)},
      {"attention_hidden", std::to_string(attention_hidden)},
      {"transfer_hidden", std::to_string(transfer_hidden)},
      {"indicator_k", std::to_string(indicator_k)},
  };
}

NetworkConfig NetworkConfig::from_meta(const std::map<std::string, std::string>& meta) {
  NetworkConfig cfg;
  const auto want = [&](const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw IoError("checkpoint meta is missing '" + key + "'");
    return it->second;
  };
  cfg.block_dims = split_ints(want("block_dims"));
  cfg.k = std::stoll(want("k"));
  cfg.downsample_to = std::stoll(want("downsample_to"));
  cfg.indicator_dim = std::stoll(want("indicator_dim"));
  cfg.head_dims = split_ints(want("head_dims"));
  cfg.attention_kind = attention_kind_from_string(want("attention"));
  cfg.attention_hidden = std::stoll(want("attention_hidden"));
  cfg.transfer_hidden = std::stoll(want("transfer_hidden"));
  cfg.indicator_k = std::stoll(want("indicator_k"));
  cfg.validate();
  return cfg;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("train: learning_rate must be > 0");
  if (iterations < 1) throw ConfigError("train: iterations must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (noise_std_fraction < 0) throw ConfigError("train: noise_std_fraction must be >= 0");
  if (surface_points < 4) throw ConfigError("train: surface_points must be >= 4");
  if (query_fine_res <= query_coarse_res)
    throw ConfigError("train: query_fine_res must exceed query_coarse_res");
  if (query_budget < 0) throw ConfigError("train: query_budget must be >= 0");
}

Network::Network(NetworkConfig cfg, uint64_t param_seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng rng(param_seed);
  const int64_t d0 = cfg_.block_dims.front();
  const int64_t d_out = cfg_.block_dims.back();

  embed_ = Mlp::create(graph_, "embed", {3, d0}, rng);
  down_omega_ = Mlp::create(graph_, "down_transfer", {3, cfg_.transfer_hidden, d0}, rng);

  for (size_t b = 0; b + 1 < cfg_.block_dims.size(); ++b) {
    const int64_t din = cfg_.block_dims[b], dout = cfg_.block_dims[b + 1];
    const std::string prefix = "block" + std::to_string(b);
    Block block{din, dout, {}, {}, {}};
    block.lin_in = Mlp::create(graph_, prefix + ".in", {din, dout}, rng);
    if (cfg_.attention_kind != AttentionKind::ScalarDot) {
      block.att = Mlp::create(graph_, prefix + ".att",
                              {attention_net_in_dim(cfg_.attention_kind, dout),
                               cfg_.attention_hidden,
                               attention_net_out_dim(cfg_.attention_kind, dout)},
                              rng);
    }
    block.lin_out = Mlp::create(graph_, prefix + ".out", {dout, dout}, rng);
    blocks_.push_back(std::move(block));
  }

  up_omega_ = Mlp::create(graph_, "up_transfer", {3, cfg_.transfer_hidden, d_out}, rng);
  indicator_omega_ = Mlp::create(graph_, "indicator", {3, cfg_.transfer_hidden, d_out}, rng);

  std::vector<int64_t> head_dims{d_out, cfg_.indicator_dim};
  head_dims.insert(head_dims.end(), cfg_.head_dims.begin(), cfg_.head_dims.end());
  head_ = Mlp::create(graph_, "head", head_dims, rng);
}

std::unique_ptr<Network> Network::load_checkpoint(const std::string& path) {
  const Checkpoint ck = Checkpoint::load(path);
  auto net = std::make_unique<Network>(NetworkConfig::from_meta(ck.meta), /*param_seed=*/0);
  ck.apply_to_graph(net->graph_);
  return net;
}

void Network::save_checkpoint(const std::string& path,
                              const std::map<std::string, std::string>& extra_meta) const {
  Checkpoint ck = Checkpoint::from_graph(const_cast<Graph&>(graph_));
  ck.meta = cfg_.to_meta();
  for (const auto& [k, v] : extra_meta) ck.meta.emplace(k, v);
  ck.save(path);
}

Tensor indicator_features(Tensor source_features, const Neighborhood& nbr, const Mlp& omega) {
  if (source_features.shape().size() != 2)
    throw ShapeError("indicator_features: features must be [N x d]");
  if (omega.in_dim() != 3 || omega.out_dim() != source_features.shape()[1])
    throw ShapeError("indicator_features: omega must map 3->" +
                     std::to_string(source_features.shape()[1]) + ", got " +
                     std::to_string(omega.in_dim()) + "->" + std::to_string(omega.out_dim()));
  const PairIndex pi = pair_indices(nbr);
  Tensor gathered = gather_rows(source_features, pi.neighbors);
  std::vector<real_t> off(pi.offsets.size() * 3);
  for (size_t p = 0; p < pi.offsets.size(); ++p) {
    // omega sees anchor - neighbor (the query-relative shift)
    off[p * 3 + 0] = static_cast<real_t>(-pi.offsets[p].x);
    off[p * 3 + 1] = static_cast<real_t>(-pi.offsets[p].y);
    off[p * 3 + 2] = static_cast<real_t>(-pi.offsets[p].z);
  }
  Tensor shifts = source_features.graph().constant(
      {static_cast<int64_t>(pi.offsets.size()), 3}, std::move(off));
  return segment_sum(hadamard(omega.forward(shifts), gathered), nbr.k);
}

Tensor Network::transfer(Tensor source_features, const Neighborhood& nbr, const Mlp& omega) {
  return indicator_features(source_features, nbr, omega);
}

Tensor Network::block_forward(int64_t block, Tensor features, const Neighborhood& nbr) {
  Block& blk = blocks_[static_cast<size_t>(block)];
  if (features.shape().size() != 2 || features.shape()[1] != blk.in_dim)
    throw ShapeError("block " + std::to_string(block) + ": expected [N x " +
                     std::to_string(blk.in_dim) + "], got " +
                     shape_to_string(features.shape()));
  Tensor a = blk.lin_in.forward(features);
  Tensor z = apply_attention(cfg_.attention_kind, a, nbr, blk.att ? &*blk.att : nullptr);
  Tensor y = blk.lin_out.forward(z);
  if (blk.in_dim == blk.out_dim) y = add(y, features);
  return y;
}

Tensor Network::backbone(const PointCloud& cloud) {
  if (cloud.empty()) throw NumericError("backbone: empty cloud");
  const int64_t n = cloud.size();

  std::vector<real_t> pos(static_cast<size_t>(n) * 3);
  for (int64_t i = 0; i < n; ++i) {
    pos[static_cast<size_t>(i) * 3 + 0] = static_cast<real_t>(cloud.points[static_cast<size_t>(i)].x);
    pos[static_cast<size_t>(i) * 3 + 1] = static_cast<real_t>(cloud.points[static_cast<size_t>(i)].y);
    pos[static_cast<size_t>(i) * 3 + 2] = static_cast<real_t>(cloud.points[static_cast<size_t>(i)].z);
  }
  Tensor embedded = embed_.forward(graph_.constant({n, 3}, std::move(pos)));

  // downsample with the learnable transfer layer
  const bool downsample = cfg_.downsample_to < n;
  PointCloud coarse;
  Tensor coarse_features = embedded;
  if (downsample) {
    const auto chosen =
        farthest_point_sample_from(cloud, cfg_.downsample_to, farthest_from_centroid(cloud));
    coarse.points.reserve(chosen.size());
    for (int64_t idx : chosen) coarse.points.push_back(cloud.points[static_cast<size_t>(idx)]);
    const Neighborhood down_nbr =
        knn(std::span<const Vec3>(coarse.points), cloud, std::min(cfg_.k, n));
    coarse_features = transfer(embedded, down_nbr, down_omega_);
  } else {
    coarse = cloud;
  }

  const Neighborhood coarse_nbr = knn(coarse, std::min(cfg_.k, coarse.size()));
  Tensor features = coarse_features;
  for (int64_t b = 0; b < static_cast<int64_t>(blocks_.size()); ++b)
    features = block_forward(b, features, coarse_nbr);

  if (!downsample) return features;
  const Neighborhood up_nbr =
      knn(std::span<const Vec3>(cloud.points), coarse, std::min(cfg_.k, coarse.size()));
  return transfer(features, up_nbr, up_omega_);
}

Tensor Network::occupancy(const PointCloud& cloud, Tensor fine_features,
                          std::span<const Vec3> queries) {
  if (cloud.empty()) throw NumericError("occupancy: empty cloud");
  if (queries.empty()) throw NumericError("occupancy: no query points");
  const int64_t kq = std::min(cfg_.indicator_k > 0 ? cfg_.indicator_k : cfg_.k, cloud.size());
  const Neighborhood qn = knn(queries, cloud, kq);
  Tensor g = transfer(fine_features, qn, indicator_omega_);
  Tensor logits = head_.forward(g);
  return reshape(sigmoid(logits), {static_cast<int64_t>(queries.size())});
}

std::vector<double> Network::predict(const PointCloud& normalized_cloud,
                                     std::span<const Vec3> queries, int64_t batch_size) {
  graph_.reset();
  Tensor feat = backbone(normalized_cloud);
  const Shape feat_shape = feat.shape();
  const std::vector<real_t> feat_values(feat.value().begin(), feat.value().end());

  std::vector<double> out;
  out.reserve(queries.size());
  for (size_t begin = 0; begin < queries.size(); begin += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(queries.size(), begin + static_cast<size_t>(batch_size));
    graph_.reset();
    Tensor fconst = graph_.constant(feat_shape, feat_values);
    Tensor occ = occupancy(normalized_cloud, fconst, queries.subspan(begin, end - begin));
    for (real_t v : occ.value()) out.push_back(static_cast<double>(v));
  }
  graph_.reset();
  return out;
}

VoxelGrid predict_field(Network& net, const PointCloud& cloud, int64_t resolution) {
  if (resolution < 8) throw ConfigError("predict_field: resolution must be >= 8");
  if (cloud.empty()) throw NumericError("predict_field: empty cloud");

  const UnitCubeTransform tr = UnitCubeTransform::from(cloud.bounding_box());
  const PointCloud normalized = tr.apply(cloud);
  VoxelGrid normalized_grid = VoxelGrid::over_box(resolution, unit_cube());

  std::vector<Vec3> queries;
  queries.reserve(static_cast<size_t>(normalized_grid.cell_count()));
  for (int64_t x = 0; x < resolution; ++x)
    for (int64_t y = 0; y < resolution; ++y)
      for (int64_t z = 0; z < resolution; ++z)
        queries.push_back(normalized_grid.cell_center(x, y, z));

  normalized_grid.values = net.predict(normalized, queries);

  // express the grid in the input cloud's frame
  VoxelGrid out = normalized_grid;
  out.h = normalized_grid.h / tr.scale;
  out.origin = tr.invert(normalized_grid.origin);
  return out;
}

TrainSample make_train_sample(const ShapeOracle& oracle, const TrainQuerySampler& sampler,
                              const TrainConfig& tc, Rng& rng) {
  TrainSample sample;
  const double noise_std = tc.noise_std_fraction * oracle.bounding_box().max_side();
  sample.cloud = oracle.sample_surface(tc.surface_points, noise_std, rng);

  QuerySet qs = sampler.sample(rng);
  if (tc.query_budget > 0 && static_cast<int64_t>(qs.queries.size()) > tc.query_budget) {
    // deterministic partial Fisher-Yates, then restore ordering
    std::vector<int64_t> idx(qs.queries.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int64_t>(i);
    for (int64_t i = 0; i < tc.query_budget; ++i)
      std::swap(idx[static_cast<size_t>(i)],
                idx[static_cast<size_t>(i) + static_cast<size_t>(rng.below(idx.size() - static_cast<size_t>(i)))]);
    idx.resize(static_cast<size_t>(tc.query_budget));
    std::sort(idx.begin(), idx.end());
    std::vector<Vec3> q;
    std::vector<double> l;
    for (int64_t i : idx) {
      q.push_back(qs.queries[static_cast<size_t>(i)]);
      l.push_back(qs.labels[static_cast<size_t>(i)]);
    }
    qs.queries = std::move(q);
    qs.labels = std::move(l);
  }
  sample.queries = std::move(qs.queries);
  sample.labels.assign(qs.labels.begin(), qs.labels.end());

  if (tc.flip_augment) {
    // labels were computed before the flip; flipping cloud and queries
    // together keeps every sample label-consistent
    sample.flip_axis = static_cast<int>(rng.below(3));
    for (Vec3& p : sample.cloud.points) p[sample.flip_axis] = -p[sample.flip_axis];
    for (Vec3& q : sample.queries) q[sample.flip_axis] = -q[sample.flip_axis];
  }

  sample.transform = UnitCubeTransform::from(sample.cloud.bounding_box());
  sample.cloud = sample.transform.apply(sample.cloud);
  for (Vec3& q : sample.queries) q = sample.transform.apply(q);
  return sample;
}

AdamOptimizer::AdamOptimizer(Graph& g, double beta1, double beta2, double eps)
    : graph_(&g), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (Tensor p : g.parameters()) {
    m_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
    v_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
  }
}

void AdamOptimizer::step(double lr) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto params = graph_->parameters();
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto values = params[pi].value_mut();
    const auto grads = params[pi].grad();
    if (grads.empty()) continue;
    for (size_t i = 0; i < values.size(); ++i) {
      const double g = static_cast<double>(grads[i]);
      double& m = m_[pi][i];
      double& v = v_[pi][i];
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g * g;
      values[i] -= static_cast<real_t>(lr * (m / bc1) / (std::sqrt(v / bc2) + eps_));
    }
  }
}

TrainResult train(Network& net, const std::vector<ShapeOracle>& shapes, const TrainConfig& tc,
                  std::ostream* log_csv) {
  tc.validate();
  if (shapes.empty()) throw ConfigError("train: dataset is empty");

  Rng rng(tc.seed);
  std::vector<TrainQuerySampler> samplers;
  samplers.reserve(shapes.size());
  for (const ShapeOracle& shape : shapes)
    samplers.emplace_back(shape, tc.query_fine_res, tc.query_coarse_res);

  AdamOptimizer adam(net.graph());
  std::optional<TrainSample> fixed_sample;

  TrainResult result;
  result.losses.reserve(static_cast<size_t>(tc.iterations));
  if (log_csv) (*log_csv) << "iteration,loss,lr\n";

  constexpr double pi_const = 3.14159265358979323846;
  for (int64_t t = 0; t < tc.iterations; ++t) {
    const double lr =
        tc.learning_rate * 0.5 *
        (1.0 + std::cos(pi_const * static_cast<double>(t) / static_cast<double>(tc.iterations)));

    net.graph().reset();
    net.graph().zero_grad();
    Tensor batch_loss;
    for (int64_t b = 0; b < tc.batch_size; ++b) {
      const size_t shape_idx = shapes.size() > 1 ? static_cast<size_t>(rng.below(shapes.size())) : 0;
      TrainSample local;
      const TrainSample* sample = nullptr;
      if (tc.resample_each_iteration) {
        local = make_train_sample(shapes[shape_idx], samplers[shape_idx], tc, rng);
        sample = &local;
      } else {
        if (!fixed_sample)
          fixed_sample = make_train_sample(shapes[shape_idx], samplers[shape_idx], tc, rng);
        sample = &*fixed_sample;
      }

      Tensor features = net.backbone(sample->cloud);
      Tensor pred = net.occupancy(sample->cloud, features, sample->queries);
      Tensor labels = net.graph().constant({static_cast<int64_t>(sample->labels.size())},
                                           sample->labels);
      Tensor loss = bce_loss(pred, labels);
      batch_loss = b == 0 ? loss : add(batch_loss, loss);
    }
    if (tc.batch_size > 1)
      batch_loss = scale(batch_loss, 1.0 / static_cast<double>(tc.batch_size));

    const double loss_value = batch_loss.item();
    if (!std::isfinite(loss_value))
      throw NumericError("training diverged: non-finite loss at iteration " +
                         std::to_string(t));

    net.graph().backward(batch_loss);
    adam.step(lr);

    result.losses.push_back(loss_value);
    result.learning_rates.push_back(lr);
    if (log_csv) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(t),
                    loss_value, lr);
      (*log_csv) << buf;
    }
  }
  net.graph().reset();
  result.final_loss = result.losses.empty() ? 0.0 : result.losses.back();
  return result;
}

}  // namespace tensorformer
