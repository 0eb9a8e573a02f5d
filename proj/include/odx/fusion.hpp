#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "odx/bev.hpp"
#include "odx/geometry.hpp"
#include "odx/map_features.hpp"
#include "odx/sensor_pipeline.hpp"

namespace odx {

// One row per token, one column per feature.
using FeatureMatrix = Eigen::MatrixXd;

// Flattened polyline-vector record fed to the encoder:
// [d_prev.x, d_prev.y, d_curr.x, d_curr.y, junction, left_ok, right_ok].
inline constexpr int kVectorRecordDim = 7;

// The decoder always emits this many waypoints.
inline constexpr int kWaypointCount = 4;

using WaypointSequence = std::vector<Vec2>;

// y = W x + b.
struct AffineLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

// Affine layers with ReLU between them; the final layer stays linear, so a
// single-layer network is purely affine.
struct MlpWeights {
    std::vector<AffineLayer> layers;
};

Eigen::VectorXd mlp_apply(const MlpWeights& mlp, const Eigen::VectorXd& x);

// Projections of one attention layer. Queries and keys must share a column
// count so the score matrix Q K^T is defined.
struct FusionWeights {
    Eigen::MatrixXd m_q;  // D_f x D_q
    Eigen::MatrixXd m_k;  // D_f x D_k with D_k = D_q
    Eigen::MatrixXd m_v;  // D_f x D_v
};

// A single recurrent cell shared across all decode steps, plus the
// feature-to-state and state-to-delta heads around it. The update gate
// weighs the candidate state: h' = (1 - z) * h + z * h_candidate.
struct GruWeights {
    Eigen::MatrixXd w_z, u_z;  // update gate, input and recurrent parts
    Eigen::VectorXd b_z;
    Eigen::MatrixXd w_r, u_r;  // reset gate
    Eigen::VectorXd b_r;
    Eigen::MatrixXd w_h, u_h;  // candidate state
    Eigen::VectorXd b_h;
    Eigen::MatrixXd w_init;    // fused feature -> initial hidden state (tanh)
    Eigen::VectorXd b_init;
    Eigen::MatrixXd w_out;     // hidden state -> 2D waypoint delta
    Eigen::VectorXd b_out;
};

struct FusionConfig {
    int feature_dim = 64;  // token width entering every attention stage
    int qk_dim = 64;       // query/key width
    int v_dim = 64;        // value width; equals feature_dim so stages chain
    int mlp_hidden = 64;   // polyline encoder hidden width
    int gru_hidden = 64;   // decoder state width
    int stages = 4;        // attention stages applied in sequence
};

// Every tensor of the desk-scale model. Weights come from a seeded stream,
// never from training; the module exists to make the arithmetic testable.
struct FusionModel {
    FusionConfig config;
    MlpWeights polyline_mlp;            // record (7) -> feature_dim
    AffineLayer lidar_embed;            // per-patch channel sums -> feature_dim
    AffineLayer radar_embed;            // radar feature row -> feature_dim
    std::vector<FusionWeights> stages;  // config.stages attention layers
    GruWeights decoder;
};

// Uniform draw in [-1/sqrt(fan_in), 1/sqrt(fan_in)) built from the top 53
// bits of one engine output, so streams match bit for bit across platforms.
double uniform_weight(std::mt19937_64& rng, int fan_in);

// Fills row by row, each entry one draw; the traversal order is part of the
// format so a seed pins every tensor.
Eigen::MatrixXd seeded_matrix(std::mt19937_64& rng, int rows, int cols, int fan_in);

// Draws all tensors from a single generator in a fixed order (encoder MLP,
// lidar embed, radar embed, attention stages, recurrent decoder). Each
// tensor's fan-in is the width of the input it multiplies; bias vectors use
// their block's total input width.
FusionModel init_fusion_model(std::uint64_t seed, const FusionConfig& config = {});

// Shared MLP over each vector's flattened record, max-pooled per polyline
// into one token row. Empty polylines are skipped with a warning; throws
// std::invalid_argument when nothing remains or the MLP input width is not
// kVectorRecordDim.
FeatureMatrix polyline_encode(const std::vector<std::vector<LaneVector>>& polylines,
                              const MlpWeights& mlp);

// Sums patch x patch cells per channel: one token per patch, one column per
// channel, patches scanned row-major. Grid extents must divide evenly.
FeatureMatrix lidar_patch_tokens(const BevGrid& grid, int patch = 32);

// Applies one affine layer to every row: (n x in) -> (n x out).
FeatureMatrix embed_tokens(const FeatureMatrix& tokens, const AffineLayer& embed);

// One row per kept radar return, padding rows included as zeros.
FeatureMatrix radar_tokens(const RadarFeatureMatrix& radar);

// Row-wise softmax with max shift; every output row sums to one.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Row-stochastic token-mixing matrix softmax(Q K^T / sqrt(D_k)).
Eigen::MatrixXd attention_weights(const FeatureMatrix& f_in, const FusionWeights& weights);

// Single-head scaled dot-product attention over all tokens: with Q = F M_q,
// K = F M_k, V = F M_v, the output is softmax(Q K^T / sqrt(D_k)) V — one row
// per input token, D_v columns. Throws std::invalid_argument on non-finite
// input or any dimension mismatch.
FeatureMatrix attention_fuse(const FeatureMatrix& f_in, const FusionWeights& weights);

// Stacks the per-sensor token rows, attends across the combined set, and
// splits the result back into the original per-sensor row counts. Sensors
// with zero tokens pass through empty.
std::vector<FeatureMatrix> fusion_block(const std::vector<FeatureMatrix>& sensors,
                                        const FusionWeights& weights);

// fusion_block once per stage, each stage consuming the previous output.
std::vector<FeatureMatrix> fusion_pipeline(std::vector<FeatureMatrix> sensors,
                                           const std::vector<FusionWeights>& stages);

// One recurrence step: z and r gates, candidate state, blended next state.
Eigen::VectorXd gru_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                         const GruWeights& weights);

struct DecodedWaypoints {
    WaypointSequence waypoints;  // running sums of the deltas, kWaypointCount long
    std::vector<Vec2> deltas;    // per-step increments, same length
};

// Unrolls the shared cell kWaypointCount times. The initial state is
// tanh(W_init f + b_init); each step reads [previous delta, goal], emits a
// 2D delta through the output head, and accumulates it into the waypoints.
DecodedWaypoints gru_decode_waypoints(const Eigen::VectorXd& fused, const Vec2& goal,
                                      const GruWeights& weights);

// Sum over waypoints of |dx| + |dy|. Throws std::invalid_argument when the
// sequences differ in length.
double l1_waypoint_loss(const WaypointSequence& pred, const WaypointSequence& gt);

// Whole toy forward pass: encodes map polylines, lidar patch sums and radar
// rows into tokens, runs every attention stage across the combined set,
// mean-pools the fused tokens, and decodes waypoints toward the goal. Runs
// map-less when every polyline is empty.
WaypointSequence fuse_forward(const FusionModel& model,
                              const std::vector<std::vector<LaneVector>>& polylines,
                              const BevGrid& lidar_grid, const RadarFeatureMatrix& radar,
                              const Vec2& goal, int lidar_patch = 32);

// Named-tensor container: 8-byte magic "ODXW0001", little-endian uint32
// tensor count, then per tensor a uint32 name length, the name bytes, uint32
// rows and cols, and row-major float32 data. Vectors store as n x 1, so a
// round trip keeps doubles only to float precision.
void write_weight_blob(const std::map<std::string, Eigen::MatrixXd>& tensors,
                       const std::string& path);
std::map<std::string, Eigen::MatrixXd> read_weight_blob(const std::string& path);

// Model <-> named tensors ("polyline_mlp.w0", "stage2.m_k", "gru.w_out", ...).
std::map<std::string, Eigen::MatrixXd> model_tensors(const FusionModel& model);
void save_fusion_model(const FusionModel& model, const std::string& path);

// Rebuilds a model from a blob, inferring the dimensions from the tensor
// shapes. Throws std::runtime_error when a tensor is missing.
FusionModel load_fusion_model(const std::string& path);

}  // namespace odx
