#include "odx/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "odx/log.hpp"

namespace odx {

namespace {

constexpr char kMagic[8] = {'O', 'D', 'X', 'W', '0', '0', '0', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    char buf[4];
    buf[0] = static_cast<char>(v & 0xff);
    buf[1] = static_cast<char>((v >> 8) & 0xff);
    buf[2] = static_cast<char>((v >> 16) & 0xff);
    buf[3] = static_cast<char>((v >> 24) & 0xff);
    out.write(buf, 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char buf[4] = {0, 0, 0, 0};
    in.read(reinterpret_cast<char*>(buf), 4);
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) |
           (static_cast<std::uint32_t>(buf[3]) << 24);
}

Eigen::VectorXd seeded_vector(std::mt19937_64& rng, int size, int fan_in) {
    return seeded_matrix(rng, size, 1, fan_in).col(0);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& v) {
    return (1.0 / (1.0 + (-v.array()).exp())).matrix();
}

void check_attention_dims(const FeatureMatrix& f_in, const FusionWeights& w) {
    if (f_in.rows() < 1 || f_in.cols() < 1) {
        throw std::invalid_argument("attention needs at least one token and one feature");
    }
    if (!f_in.allFinite()) throw std::invalid_argument("attention input must be finite");
    if (f_in.cols() != w.m_q.rows() || f_in.cols() != w.m_k.rows() ||
        f_in.cols() != w.m_v.rows()) {
        throw std::invalid_argument("attention projections do not match the feature width");
    }
    if (w.m_q.cols() != w.m_k.cols()) {
        throw std::invalid_argument("query and key projections must share a width");
    }
}

Eigen::VectorXd vector_record(const LaneVector& v) {
    Eigen::VectorXd record(kVectorRecordDim);
    record << v.d_prev.x, v.d_prev.y, v.d_curr.x, v.d_curr.y,
        v.labels.junction ? 1.0 : 0.0, v.labels.left_change_ok ? 1.0 : 0.0,
        v.labels.right_change_ok ? 1.0 : 0.0;
    return record;
}

const Eigen::MatrixXd& named_tensor(const std::map<std::string, Eigen::MatrixXd>& tensors,
                                    const std::string& name) {
    const auto it = tensors.find(name);
    if (it == tensors.end()) throw std::runtime_error("weight blob lacks tensor " + name);
    return it->second;
}

}  // namespace

Eigen::VectorXd AffineLayer::apply(const Eigen::VectorXd& x) const {
    if (x.size() != weight.cols()) {
        throw std::invalid_argument("affine layer input width mismatch");
    }
    return weight * x + bias;
}

Eigen::VectorXd mlp_apply(const MlpWeights& mlp, const Eigen::VectorXd& x) {
    if (mlp.layers.empty()) throw std::invalid_argument("mlp has no layers");
    Eigen::VectorXd value = x;
    for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
        value = mlp.layers[i].apply(value);
        if (i + 1 < mlp.layers.size()) value = value.cwiseMax(0.0);
    }
    return value;
}

double uniform_weight(std::mt19937_64& rng, int fan_in) {
    if (fan_in <= 0) throw std::invalid_argument("fan_in must be positive");
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    return (2.0 * unit - 1.0) / std::sqrt(static_cast<double>(fan_in));
}

Eigen::MatrixXd seeded_matrix(std::mt19937_64& rng, int rows, int cols, int fan_in) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("tensor dims must be positive");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = uniform_weight(rng, fan_in);
    }
    return m;
}

FusionModel init_fusion_model(std::uint64_t seed, const FusionConfig& config) {
    if (config.feature_dim <= 0 || config.qk_dim <= 0 || config.v_dim <= 0 ||
        config.mlp_hidden <= 0 || config.gru_hidden <= 0 || config.stages <= 0) {
        throw std::invalid_argument("fusion config dims must be positive");
    }
    if (config.v_dim != config.feature_dim) {
        throw std::invalid_argument("value width must equal the feature width for chaining");
    }
    std::mt19937_64 rng(seed);
    FusionModel model;
    model.config = config;

    AffineLayer hidden;
    hidden.weight = seeded_matrix(rng, config.mlp_hidden, kVectorRecordDim, kVectorRecordDim);
    hidden.bias = seeded_vector(rng, config.mlp_hidden, kVectorRecordDim);
    AffineLayer out;
    out.weight = seeded_matrix(rng, config.feature_dim, config.mlp_hidden, config.mlp_hidden);
    out.bias = seeded_vector(rng, config.feature_dim, config.mlp_hidden);
    model.polyline_mlp.layers = {hidden, out};

    model.lidar_embed.weight = seeded_matrix(rng, config.feature_dim, 2, 2);
    model.lidar_embed.bias = seeded_vector(rng, config.feature_dim, 2);
    model.radar_embed.weight = seeded_matrix(rng, config.feature_dim, 5, 5);
    model.radar_embed.bias = seeded_vector(rng, config.feature_dim, 5);

    for (int s = 0; s < config.stages; ++s) {
        FusionWeights stage;
        stage.m_q = seeded_matrix(rng, config.feature_dim, config.qk_dim, config.feature_dim);
        stage.m_k = seeded_matrix(rng, config.feature_dim, config.qk_dim, config.feature_dim);
        stage.m_v = seeded_matrix(rng, config.feature_dim, config.v_dim, config.feature_dim);
        model.stages.push_back(std::move(stage));
    }

    const int x_dim = 4;  // previous delta (2) + goal (2)
    const int h = config.gru_hidden;
    const int gate_fan = x_dim + h;
    GruWeights& g = model.decoder;
    g.w_z = seeded_matrix(rng, h, x_dim, gate_fan);
    g.u_z = seeded_matrix(rng, h, h, gate_fan);
    g.b_z = seeded_vector(rng, h, gate_fan);
    g.w_r = seeded_matrix(rng, h, x_dim, gate_fan);
    g.u_r = seeded_matrix(rng, h, h, gate_fan);
    g.b_r = seeded_vector(rng, h, gate_fan);
    g.w_h = seeded_matrix(rng, h, x_dim, gate_fan);
    g.u_h = seeded_matrix(rng, h, h, gate_fan);
    g.b_h = seeded_vector(rng, h, gate_fan);
    g.w_init = seeded_matrix(rng, h, config.feature_dim, config.feature_dim);
    g.b_init = seeded_vector(rng, h, config.feature_dim);
    g.w_out = seeded_matrix(rng, 2, h, h);
    g.b_out = seeded_vector(rng, 2, h);
    return model;
}

FeatureMatrix polyline_encode(const std::vector<std::vector<LaneVector>>& polylines,
                              const MlpWeights& mlp) {
    if (mlp.layers.empty() || mlp.layers.front().weight.cols() != kVectorRecordDim) {
        throw std::invalid_argument("polyline encoder expects 7-wide vector records");
    }
    std::vector<Eigen::VectorXd> rows;
    for (const auto& polyline : polylines) {
        if (polyline.empty()) {
            log_warn("polyline_encode: skipping empty polyline");
            continue;
        }
        Eigen::VectorXd pooled = mlp_apply(mlp, vector_record(polyline.front()));
        for (std::size_t i = 1; i < polyline.size(); ++i) {
            pooled = pooled.cwiseMax(mlp_apply(mlp, vector_record(polyline[i])));
        }
        rows.push_back(std::move(pooled));
    }
    if (rows.empty()) throw std::invalid_argument("no non-empty polylines to encode");
    FeatureMatrix features(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        features.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return features;
}

FeatureMatrix lidar_patch_tokens(const BevGrid& grid, int patch) {
    if (patch <= 0) throw std::invalid_argument("patch size must be positive");
    if (grid.height() % patch != 0 || grid.width() % patch != 0) {
        throw std::invalid_argument("grid extents must divide evenly into patches");
    }
    const int patch_rows = grid.height() / patch;
    const int patch_cols = grid.width() / patch;
    FeatureMatrix tokens(patch_rows * patch_cols, grid.channels());
    for (int pr = 0; pr < patch_rows; ++pr) {
        for (int pc = 0; pc < patch_cols; ++pc) {
            for (int ch = 0; ch < grid.channels(); ++ch) {
                double sum = 0.0;
                for (int r = pr * patch; r < (pr + 1) * patch; ++r) {
                    for (int c = pc * patch; c < (pc + 1) * patch; ++c) {
                        sum += grid.at(ch, r, c);
                    }
                }
                tokens(pr * patch_cols + pc, ch) = sum;
            }
        }
    }
    return tokens;
}

FeatureMatrix embed_tokens(const FeatureMatrix& tokens, const AffineLayer& embed) {
    if (tokens.cols() != embed.weight.cols()) {
        throw std::invalid_argument("token width does not match the embedding");
    }
    FeatureMatrix out = tokens * embed.weight.transpose();
    out.rowwise() += embed.bias.transpose();
    return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd result(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const Eigen::ArrayXd shifted =
            logits.row(r).array() - logits.row(r).maxCoeff();
        const Eigen::ArrayXd exps = shifted.exp();
        result.row(r) = (exps / exps.sum()).matrix().transpose();
    }
    return result;
}

Eigen::MatrixXd attention_weights(const FeatureMatrix& f_in, const FusionWeights& weights) {
    check_attention_dims(f_in, weights);
    const Eigen::MatrixXd q = f_in * weights.m_q;
    const Eigen::MatrixXd k = f_in * weights.m_k;
    const double scale = 1.0 / std::sqrt(static_cast<double>(weights.m_k.cols()));
    return softmax_rows(q * k.transpose() * scale);
}

FeatureMatrix attention_fuse(const FeatureMatrix& f_in, const FusionWeights& weights) {
    return attention_weights(f_in, weights) * (f_in * weights.m_v);
}

std::vector<FeatureMatrix> fusion_block(const std::vector<FeatureMatrix>& sensors,
                                        const FusionWeights& weights) {
    if (sensors.empty()) throw std::invalid_argument("fusion_block needs at least one sensor");
    Eigen::Index total_rows = 0;
    Eigen::Index cols = -1;
    for (const FeatureMatrix& m : sensors) {
        if (m.rows() == 0) continue;
        if (cols < 0) cols = m.cols();
        if (m.cols() != cols) {
            throw std::invalid_argument("sensor feature widths differ");
        }
        total_rows += m.rows();
    }
    if (total_rows == 0) throw std::invalid_argument("fusion_block got no tokens");

    FeatureMatrix stacked(total_rows, cols);
    Eigen::Index offset = 0;
    for (const FeatureMatrix& m : sensors) {
        if (m.rows() == 0) continue;
        stacked.middleRows(offset, m.rows()) = m;
        offset += m.rows();
    }
    const FeatureMatrix fused = attention_fuse(stacked, weights);

    std::vector<FeatureMatrix> split;
    offset = 0;
    for (const FeatureMatrix& m : sensors) {
        if (m.rows() == 0) {
            split.emplace_back(0, fused.cols());
            continue;
        }
        split.push_back(fused.middleRows(offset, m.rows()));
        offset += m.rows();
    }
    return split;
}

std::vector<FeatureMatrix> fusion_pipeline(std::vector<FeatureMatrix> sensors,
                                           const std::vector<FusionWeights>& stages) {
    if (stages.empty()) throw std::invalid_argument("fusion_pipeline needs stages");
    for (const FusionWeights& stage : stages) sensors = fusion_block(sensors, stage);
    return sensors;
}

Eigen::VectorXd gru_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                         const GruWeights& weights) {
    if (x.size() != weights.w_z.cols() || h.size() != weights.u_z.cols() ||
        h.size() != weights.u_z.rows()) {
        throw std::invalid_argument("recurrent cell dimension mismatch");
    }
    const Eigen::VectorXd z = sigmoid(weights.w_z * x + weights.u_z * h + weights.b_z);
    const Eigen::VectorXd r = sigmoid(weights.w_r * x + weights.u_r * h + weights.b_r);
    const Eigen::VectorXd candidate =
        (weights.w_h * x + weights.u_h * r.cwiseProduct(h) + weights.b_h)
            .array()
            .tanh()
            .matrix();
    return (1.0 - z.array()).matrix().cwiseProduct(h) + z.cwiseProduct(candidate);
}

DecodedWaypoints gru_decode_waypoints(const Eigen::VectorXd& fused, const Vec2& goal,
                                      const GruWeights& weights) {
    if (fused.size() != weights.w_init.cols()) {
        throw std::invalid_argument("fused feature width does not match the decoder");
    }
    if (!std::isfinite(goal.x) || !std::isfinite(goal.y)) {
        throw std::invalid_argument("goal must be finite");
    }
    if (weights.w_z.cols() != 4) {
        throw std::invalid_argument("decoder step input must be [delta, goal]");
    }
    Eigen::VectorXd h = (weights.w_init * fused + weights.b_init).array().tanh().matrix();

    DecodedWaypoints decoded;
    Vec2 delta{0.0, 0.0};
    Vec2 position{0.0, 0.0};
    for (int t = 0; t < kWaypointCount; ++t) {
        Eigen::VectorXd x(4);
        x << delta.x, delta.y, goal.x, goal.y;
        h = gru_cell(x, h, weights);
        const Eigen::VectorXd step = weights.w_out * h + weights.b_out;
        delta = {step(0), step(1)};
        position = position + delta;
        decoded.deltas.push_back(delta);
        decoded.waypoints.push_back(position);
    }
    return decoded;
}

double l1_waypoint_loss(const WaypointSequence& pred, const WaypointSequence& gt) {
    if (pred.size() != gt.size()) {
        throw std::invalid_argument("waypoint sequences differ in length");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        loss += std::fabs(pred[i].x - gt[i].x) + std::fabs(pred[i].y - gt[i].y);
    }
    return loss;
}

FeatureMatrix radar_tokens(const RadarFeatureMatrix& radar) {
    FeatureMatrix tokens(static_cast<Eigen::Index>(radar.rows.size()), kRadarFeatureDim);
    for (std::size_t i = 0; i < radar.rows.size(); ++i) {
        for (std::size_t j = 0; j < kRadarFeatureDim; ++j) {
            tokens(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                radar.rows[i][j];
        }
    }
    return tokens;
}

WaypointSequence fuse_forward(const FusionModel& model,
                              const std::vector<std::vector<LaneVector>>& polylines,
                              const BevGrid& lidar_grid, const RadarFeatureMatrix& radar,
                              const Vec2& goal, int lidar_patch) {
    std::vector<FeatureMatrix> sensors;
    const bool has_map = std::any_of(polylines.begin(), polylines.end(),
                                     [](const auto& p) { return !p.empty(); });
    if (has_map) {
        sensors.push_back(polyline_encode(polylines, model.polyline_mlp));
    } else {
        log_warn("fuse_forward: no map polylines, fusing lidar and radar only");
        sensors.emplace_back(0, model.config.feature_dim);
    }
    sensors.push_back(
        embed_tokens(lidar_patch_tokens(lidar_grid, lidar_patch), model.lidar_embed));
    sensors.push_back(embed_tokens(radar_tokens(radar), model.radar_embed));

    const std::vector<FeatureMatrix> fused = fusion_pipeline(std::move(sensors), model.stages);
    Eigen::Index total = 0;
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(model.config.v_dim);
    for (const FeatureMatrix& m : fused) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) pooled += m.row(r).transpose();
        total += m.rows();
    }
    pooled /= static_cast<double>(total);
    return gru_decode_waypoints(pooled, goal, model.decoder).waypoints;
}

void write_weight_blob(const std::map<std::string, Eigen::MatrixXd>& tensors,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, tensor] : tensors) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(tensor.rows()));
        put_u32(out, static_cast<std::uint32_t>(tensor.cols()));
        for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
                const float v = static_cast<float>(tensor(r, c));
                static_assert(sizeof(float) == 4);
                char buf[4];
                std::memcpy(buf, &v, 4);
                out.write(buf, 4);
            }
        }
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

std::map<std::string, Eigen::MatrixXd> read_weight_blob(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error(path + " is not an ODXW0001 weight blob");
    }
    const std::uint32_t count = get_u32(in);
    if (!in || count > 100000) throw std::runtime_error(path + " has a bad tensor count");

    std::map<std::string, Eigen::MatrixXd> tensors;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = get_u32(in);
        if (!in || name_len == 0 || name_len > 4096) {
            throw std::runtime_error(path + " has a bad tensor name");
        }
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rows = get_u32(in);
        const std::uint32_t cols = get_u32(in);
        if (!in || rows == 0 || cols == 0) {
            throw std::runtime_error(path + " has bad dims for tensor " + name);
        }
        Eigen::MatrixXd tensor(rows, cols);
        std::vector<char> raw(static_cast<std::size_t>(rows) * cols * 4);
        in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
        if (!in) throw std::runtime_error(path + " is truncated in tensor " + name);
        for (std::uint32_t r = 0; r < rows; ++r) {
            for (std::uint32_t c = 0; c < cols; ++c) {
                float v;
                std::memcpy(&v, raw.data() + (static_cast<std::size_t>(r) * cols + c) * 4, 4);
                tensor(r, c) = static_cast<double>(v);
            }
        }
        tensors.emplace(std::move(name), std::move(tensor));
    }
    return tensors;
}

std::map<std::string, Eigen::MatrixXd> model_tensors(const FusionModel& model) {
    std::map<std::string, Eigen::MatrixXd> tensors;
    for (std::size_t i = 0; i < model.polyline_mlp.layers.size(); ++i) {
        const std::string tag = std::to_string(i);
        tensors["polyline_mlp.w" + tag] = model.polyline_mlp.layers[i].weight;
        tensors["polyline_mlp.b" + tag] = model.polyline_mlp.layers[i].bias;
    }
    tensors["lidar_embed.w"] = model.lidar_embed.weight;
    tensors["lidar_embed.b"] = model.lidar_embed.bias;
    tensors["radar_embed.w"] = model.radar_embed.weight;
    tensors["radar_embed.b"] = model.radar_embed.bias;
    for (std::size_t s = 0; s < model.stages.size(); ++s) {
        const std::string tag = "stage" + std::to_string(s);
        tensors[tag + ".m_q"] = model.stages[s].m_q;
        tensors[tag + ".m_k"] = model.stages[s].m_k;
        tensors[tag + ".m_v"] = model.stages[s].m_v;
    }
    const GruWeights& g = model.decoder;
    tensors["gru.w_z"] = g.w_z;
    tensors["gru.u_z"] = g.u_z;
    tensors["gru.b_z"] = g.b_z;
    tensors["gru.w_r"] = g.w_r;
    tensors["gru.u_r"] = g.u_r;
    tensors["gru.b_r"] = g.b_r;
    tensors["gru.w_h"] = g.w_h;
    tensors["gru.u_h"] = g.u_h;
    tensors["gru.b_h"] = g.b_h;
    tensors["gru.w_init"] = g.w_init;
    tensors["gru.b_init"] = g.b_init;
    tensors["gru.w_out"] = g.w_out;
    tensors["gru.b_out"] = g.b_out;
    return tensors;
}

void save_fusion_model(const FusionModel& model, const std::string& path) {
    write_weight_blob(model_tensors(model), path);
}

FusionModel load_fusion_model(const std::string& path) {
    const auto tensors = read_weight_blob(path);
    FusionModel model;

    for (std::size_t i = 0;; ++i) {
        const std::string tag = std::to_string(i);
        if (tensors.find("polyline_mlp.w" + tag) == tensors.end()) break;
        AffineLayer layer;
        layer.weight = named_tensor(tensors, "polyline_mlp.w" + tag);
        layer.bias = named_tensor(tensors, "polyline_mlp.b" + tag).col(0);
        model.polyline_mlp.layers.push_back(std::move(layer));
    }
    if (model.polyline_mlp.layers.empty()) {
        throw std::runtime_error(path + " holds no polyline encoder layers");
    }
    model.lidar_embed.weight = named_tensor(tensors, "lidar_embed.w");
    model.lidar_embed.bias = named_tensor(tensors, "lidar_embed.b").col(0);
    model.radar_embed.weight = named_tensor(tensors, "radar_embed.w");
    model.radar_embed.bias = named_tensor(tensors, "radar_embed.b").col(0);

    for (std::size_t s = 0;; ++s) {
        const std::string tag = "stage" + std::to_string(s);
        if (tensors.find(tag + ".m_q") == tensors.end()) break;
        FusionWeights stage;
        stage.m_q = named_tensor(tensors, tag + ".m_q");
        stage.m_k = named_tensor(tensors, tag + ".m_k");
        stage.m_v = named_tensor(tensors, tag + ".m_v");
        model.stages.push_back(std::move(stage));
    }
    if (model.stages.empty()) throw std::runtime_error(path + " holds no attention stages");

    GruWeights& g = model.decoder;
    g.w_z = named_tensor(tensors, "gru.w_z");
    g.u_z = named_tensor(tensors, "gru.u_z");
    g.b_z = named_tensor(tensors, "gru.b_z").col(0);
    g.w_r = named_tensor(tensors, "gru.w_r");
    g.u_r = named_tensor(tensors, "gru.u_r");
    g.b_r = named_tensor(tensors, "gru.b_r").col(0);
    g.w_h = named_tensor(tensors, "gru.w_h");
    g.u_h = named_tensor(tensors, "gru.u_h");
    g.b_h = named_tensor(tensors, "gru.b_h").col(0);
    g.w_init = named_tensor(tensors, "gru.w_init");
    g.b_init = named_tensor(tensors, "gru.b_init").col(0);
    g.w_out = named_tensor(tensors, "gru.w_out");
    g.b_out = named_tensor(tensors, "gru.b_out").col(0);

    model.config.feature_dim = static_cast<int>(model.stages.front().m_q.rows());
    model.config.qk_dim = static_cast<int>(model.stages.front().m_q.cols());
    model.config.v_dim = static_cast<int>(model.stages.front().m_v.cols());
    model.config.mlp_hidden = static_cast<int>(model.polyline_mlp.layers.front().weight.rows());
    model.config.gru_hidden = static_cast<int>(g.u_z.rows());
    model.config.stages = static_cast<int>(model.stages.size());
    return model;
}

}  // namespace odx
