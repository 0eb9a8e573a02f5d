// odx: command line front end for the map, rollout, scoring and fusion
// libraries. Every command is deterministic for a fixed set of flags, so
// rerunning one reproduces its artifacts byte for byte.
//
// Exit codes: 0 success, 1 domain failure (map errors, aborted rollouts,
// empty score inputs), 2 unreadable or malformed input files, 64 usage.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "odx/bev.hpp"
#include "odx/config.hpp"
#include "odx/fusion.hpp"
#include "odx/geometry.hpp"
#include "odx/map_features.hpp"
#include "odx/opendrive_parser.hpp"
#include "odx/scoring.hpp"
#include "odx/sensor_pipeline.hpp"
#include "odx/sim_harness.hpp"

namespace fs = std::filesystem;

namespace {

// Flag-level mistakes that CLI11 cannot catch itself (malformed tuples and
// the like); reported on stderr and mapped to exit code 64.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_fields(const std::string& text) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_number(const std::string& text, const std::string& flag) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError(flag + " expects comma separated numbers, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(value)) {
        throw UsageError(flag + " expects comma separated numbers, got '" + text + "'");
    }
    return value;
}

odx::Pose2 parse_pose(const std::string& text) {
    std::vector<std::string> fields = split_fields(text);
    if (fields.size() != 3) throw UsageError("--ego expects x,y,heading");
    odx::Pose2 pose;
    pose.position.x = parse_number(fields[0], "--ego");
    pose.position.y = parse_number(fields[1], "--ego");
    pose.heading = parse_number(fields[2], "--ego");
    return pose;
}

odx::Vec2 parse_point(const std::string& text, const std::string& flag) {
    std::vector<std::string> fields = split_fields(text);
    if (fields.size() != 2) throw UsageError(flag + " expects x,y");
    return {parse_number(fields[0], flag), parse_number(fields[1], flag)};
}

odx::RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return odx::RunConfig{};
    return odx::load_run_config(path);
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << body;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string format_fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

// --- parse ---------------------------------------------------------------

int cmd_parse(const std::string& map_path, bool strict, const std::string& report_path) {
    odx::ParseResult parsed = odx::parse_opendrive_file(map_path, strict);
    std::vector<odx::ParseIssue> issues = parsed.issues;
    std::vector<odx::ParseIssue> validation = odx::validate_network(parsed.network);
    issues.insert(issues.end(), validation.begin(), validation.end());

    std::size_t error_count = 0;
    for (const odx::ParseIssue& issue : issues) {
        if (issue.severity == odx::IssueSeverity::kError) ++error_count;
    }
    bool ok = error_count == 0;

    odx::NetworkSummary summary = odx::summarize(parsed.network);
    if (!report_path.empty()) {
        nlohmann::json report;
        report["file"] = map_path;
        report["ok"] = ok;
        report["summary"] = odx::summary_to_json(summary);
        nlohmann::json list = nlohmann::json::array();
        for (const odx::ParseIssue& issue : issues) {
            list.push_back({{"severity", odx::severity_name(issue.severity)},
                            {"locator", issue.locator},
                            {"message", issue.message}});
        }
        report["issues"] = list;
        write_text_file(report_path, report.dump(2) + "\n");
    }

    std::cout << map_path << ": " << summary.road_count << " roads, "
              << summary.driving_lane_count << " driving lanes, "
              << format_fixed(summary.total_centerline_length_m, 1) << " m of centerline, "
              << issues.size() << " issues (" << error_count << " errors)\n";
    for (const odx::ParseIssue& issue : issues) {
        std::cout << "  " << odx::severity_name(issue.severity) << " @" << issue.locator << ": "
                  << issue.message << "\n";
    }
    return ok ? 0 : 1;
}

// --- vectorize ------------------------------------------------------------

int cmd_vectorize(const std::string& map_path, const std::string& ego_text, double ds,
                  const std::string& out_path) {
    odx::Pose2 ego = parse_pose(ego_text);
    odx::ParseResult parsed = odx::parse_opendrive_file(map_path);
    std::vector<odx::RoughLane> rough = odx::discretize_lanes(parsed.network, ds);
    std::vector<odx::RoughLane> window = odx::select_window(rough, ego);
    odx::write_rough_lanes_jsonl(window, out_path);

    std::size_t vector_count = 0;
    for (const odx::RoughLane& lane : window) vector_count += odx::vectorize(lane).size();
    std::cout << "wrote " << window.size() << " lane chunks (" << vector_count
              << " vectors) to " << out_path << "\n";
    return 0;
}

// --- raster ---------------------------------------------------------------

int cmd_raster(const std::string& map_path, const std::string& ego_text, int resolution,
               const std::string& out_path, const std::string& tensor_path) {
    odx::Pose2 ego = parse_pose(ego_text);
    odx::ParseResult parsed = odx::parse_opendrive_file(map_path);
    std::vector<odx::RoughLane> rough = odx::discretize_lanes(parsed.network);
    std::vector<odx::RoughLane> window = odx::select_window(rough, ego);

    odx::BevGridConfig config = odx::default_raster_config();
    if (resolution > 0) {
        config.width_px = resolution;
        config.height_px = resolution;
        config.meters_per_pixel = 28.0 / resolution;
    }
    odx::BevGrid grid = odx::rasterize_bev(window, config);
    odx::write_pgm(grid, 0, out_path);
    if (!tensor_path.empty()) odx::write_bev_tensor(grid, tensor_path);

    std::size_t occupied = 0;
    for (int row = 0; row < grid.height(); ++row) {
        for (int col = 0; col < grid.width(); ++col) {
            if (grid.at(0, row, col) > 0.0f) ++occupied;
        }
    }
    std::cout << "wrote " << grid.width() << "x" << grid.height() << " grid ("
              << occupied << " occupied px) to " << out_path << "\n";
    return 0;
}

// --- run --------------------------------------------------------------------

// Ground-truth lidar stand-in: walks every non-ego hull outline at a fixed
// step and three scan heights, expressed in the ego frame. Deterministic for
// a given snapshot, which keeps capture files reproducible.
std::vector<odx::LidarPoint> synth_lidar_points(const odx::WorldSnapshot& snapshot) {
    const odx::AgentState* ego = nullptr;
    for (const odx::AgentState& agent : snapshot.agents) {
        if (agent.id == snapshot.ego_id) ego = &agent;
    }
    std::vector<odx::LidarPoint> points;
    if (ego == nullptr) return points;
    odx::Pose2 ego_pose{ego->position, ego->heading};

    constexpr double kStep = 0.25;
    constexpr double kHeights[] = {0.3, 0.9, 1.5};
    for (const odx::AgentState& agent : snapshot.agents) {
        if (agent.id == snapshot.ego_id) continue;
        odx::Pose2 hull{agent.position, agent.heading};
        const double hl = agent.half_length;
        const double hw = agent.half_width;
        // Box outline as four parameterized edges, walked corner to corner.
        const odx::Vec2 corners[4] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
        for (int edge = 0; edge < 4; ++edge) {
            odx::Vec2 a = corners[edge];
            odx::Vec2 b = corners[(edge + 1) % 4];
            double length = std::hypot(b.x - a.x, b.y - a.y);
            int samples = std::max(1, static_cast<int>(length / kStep));
            for (int i = 0; i < samples; ++i) {
                double t = static_cast<double>(i) / samples;
                odx::Vec2 local{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
                odx::Vec2 world = hull.local_to_world(local);
                odx::Vec2 in_ego = ego_pose.world_to_local(world);
                for (double z : kHeights) points.push_back({in_ego.x, in_ego.y, z});
            }
        }
    }
    return points;
}

int cmd_run(const std::string& scenario_path, const std::string& policy, bool seed_given,
            std::uint64_t seed, bool sensors, const std::string& out_dir,
            const odx::RunConfig& config) {
    odx::Scenario scenario = odx::load_scenario(scenario_path);
    if (seed_given) scenario.seed = seed;
    odx::PolicyKind kind =
        policy == "full" ? odx::PolicyKind::kFull : odx::PolicyKind::kBaseline;

    odx::ParseResult parsed = odx::parse_opendrive_file(scenario.map_path);
    odx::SimResult result = odx::run_scenario(scenario, parsed.network, kind, config.expert,
                                              config.dt, config.vehicle, config.infractions);

    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    odx::write_trace_jsonl(result.trace, (dir / "trace.jsonl").string());
    odx::write_events_json(result.events, (dir / "events.json").string());
    odx::write_run_meta(result, (dir / "meta.json").string());
    if (sensors && !result.trace.empty()) {
        const odx::WorldSnapshot& mid = result.trace[result.trace.size() / 2];
        odx::write_lidar_binary(synth_lidar_points(mid), (dir / "lidar.bin").string());
        odx::write_radar_csv(odx::synth_radar_returns(mid), (dir / "radar.csv").string());
    }

    std::cout << result.scenario_name << " [" << result.policy_name << "]: "
              << result.trace.size() << " snapshots, " << result.events.size()
              << " infractions, " << format_fixed(result.ego_distance, 1) << " m driven, goal "
              << (result.goal_reached ? "reached" : "not reached") << "\n";
    if (result.aborted) {
        std::cerr << "error: rollout aborted: " << result.abort_reason << "\n";
        return 1;
    }
    return 0;
}

// --- score ------------------------------------------------------------------

struct PolicyBand {
    double score_sum = 0.0;
    double completion_sum = 0.0;
    double km_sum = 0.0;
    std::size_t event_sum = 0;
    std::size_t runs = 0;
};

std::string svg_bar(double x, double base_y, double height, double width,
                    const std::string& fill) {
    return "  <rect x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(base_y - height, 1) +
           "\" width=\"" + format_fixed(width, 1) + "\" height=\"" + format_fixed(height, 1) +
           "\" fill=\"" + fill + "\"/>\n";
}

std::string svg_text(double x, double y, const std::string& body, int size,
                     const std::string& anchor) {
    return "  <text x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(y, 1) +
           "\" font-family=\"monospace\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + body + "</text>\n";
}

// Grouped bar chart: one group per policy with its mean driving score and
// mean completion on a 0..100 axis, plus the pooled infraction rate as text.
void write_score_plot(const std::vector<odx::RouteScore>& routes, const std::string& path) {
    std::map<std::string, PolicyBand> bands;
    for (const odx::RouteScore& route : routes) {
        PolicyBand& band = bands[route.policy_name];
        band.score_sum += route.score;
        band.completion_sum += route.completion;
        band.km_sum += route.driven_km;
        band.event_sum += route.infraction_count;
        band.runs += 1;
    }

    const double width = 160.0 + 140.0 * static_cast<double>(bands.size());
    const double height = 300.0;
    const double base_y = 230.0;
    const double axis_h = 180.0;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(width, 0) +
           "\" height=\"" + format_fixed(height, 0) + "\" viewBox=\"0 0 " +
           format_fixed(width, 0) + " " + format_fixed(height, 0) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += svg_text(width / 2.0, 28.0, "driving scores by policy", 14, "middle");
    for (int tick = 0; tick <= 100; tick += 50) {
        double y = base_y - axis_h * tick / 100.0;
        svg += "  <line x1=\"60\" y1=\"" + format_fixed(y, 1) + "\" x2=\"" +
               format_fixed(width - 20.0, 1) + "\" y2=\"" + format_fixed(y, 1) +
               "\" stroke=\"#cccccc\"/>\n";
        svg += svg_text(52.0, y + 4.0, std::to_string(tick), 11, "end");
    }

    double group_x = 90.0;
    for (const auto& [policy, band] : bands) {
        double runs = static_cast<double>(band.runs);
        double mean_score = band.score_sum / runs;
        double mean_completion = band.completion_sum / runs;
        svg += svg_bar(group_x, base_y, axis_h * mean_score / 100.0, 36.0, "#2b6cb0");
        svg += svg_bar(group_x + 44.0, base_y, axis_h * mean_completion / 100.0, 36.0, "#9ac0e0");
        svg += svg_text(group_x + 18.0, base_y - axis_h * mean_score / 100.0 - 6.0,
                        format_fixed(mean_score, 1), 11, "middle");
        svg += svg_text(group_x + 62.0, base_y - axis_h * mean_completion / 100.0 - 6.0,
                        format_fixed(mean_completion, 1), 11, "middle");
        std::string rate = band.km_sum > 0.0
                               ? format_fixed(static_cast<double>(band.event_sum) / band.km_sum, 2)
                               : "n/a";
        svg += svg_text(group_x + 40.0, base_y + 20.0, policy, 12, "middle");
        svg += svg_text(group_x + 40.0, base_y + 38.0, "infra/km " + rate, 11, "middle");
        group_x += 140.0;
    }
    svg += svg_text(90.0, 278.0, "dark: mean DS, light: mean RC", 11, "start");
    svg += "</svg>\n";
    write_text_file(path, svg);
}

int cmd_score(const std::string& runs_dir, const std::string& csv_path,
              const std::string& json_path, const std::string& plot_path,
              const odx::RunConfig& config) {
    std::vector<fs::path> run_dirs;
    if (fs::exists(fs::path(runs_dir) / "meta.json")) {
        run_dirs.push_back(runs_dir);
    } else if (fs::is_directory(runs_dir)) {
        for (const fs::directory_entry& entry : fs::directory_iterator(runs_dir)) {
            if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) {
                run_dirs.push_back(entry.path());
            }
        }
        std::sort(run_dirs.begin(), run_dirs.end());
    }
    if (run_dirs.empty()) {
        std::cerr << "error: no completed runs (meta.json) under " << runs_dir << "\n";
        return 1;
    }

    std::vector<odx::RouteScore> routes;
    for (const fs::path& dir : run_dirs) {
        odx::RunMeta meta = odx::read_run_meta((dir / "meta.json").string());
        std::vector<odx::WorldSnapshot> trace = odx::read_trace_jsonl((dir / "trace.jsonl").string());
        std::vector<odx::InfractionEvent> events = odx::read_events_json((dir / "events.json").string());
        odx::RouteScore route = odx::score_route(trace, events, meta, config.penalties);
        route.route_id = meta.scenario_name + "/" + meta.policy_name;
        routes.push_back(route);
    }

    odx::SuiteScore suite = odx::aggregate_scores(routes);
    odx::write_score_csv(suite, csv_path);
    if (!json_path.empty()) odx::write_score_json(suite, json_path);
    if (!plot_path.empty()) write_score_plot(routes, plot_path);

    std::cout << routes.size() << " runs scored: mean DS " << format_fixed(suite.mean_score, 2)
              << ", mean RC " << format_fixed(suite.mean_completion, 2) << ", "
              << format_fixed(suite.infractions_per_km, 4) << " infractions/km -> " << csv_path
              << "\n";
    return 0;
}

// --- fuse-demo ----------------------------------------------------------------

int cmd_fuse_demo(const std::string& lanes_path, const std::string& lidar_path,
                  const std::string& radar_path, std::uint64_t seed, const std::string& goal_text,
                  const std::string& out_path, const std::string& weights_path,
                  const odx::RunConfig& config) {
    odx::Vec2 goal = parse_point(goal_text, "--goal");

    std::vector<odx::RoughLane> rough = odx::read_rough_lanes_jsonl(lanes_path);
    std::vector<std::vector<odx::LaneVector>> polylines;
    polylines.reserve(rough.size());
    for (const odx::RoughLane& lane : rough) polylines.push_back(odx::vectorize(lane));

    odx::BevGrid lidar_grid = odx::lidar_to_bev(odx::read_lidar_file(lidar_path));
    odx::RadarFeatureMatrix radar = odx::radar_select(odx::read_radar_csv(radar_path));

    odx::FusionModel model = odx::init_fusion_model(seed, config.fusion);
    odx::WaypointSequence waypoints =
        odx::fuse_forward(model, polylines, lidar_grid, radar, goal);

    nlohmann::json out;
    out["seed"] = seed;
    out["goal"] = {goal.x, goal.y};
    nlohmann::json list = nlohmann::json::array();
    for (const odx::Vec2& wp : waypoints) list.push_back({wp.x, wp.y});
    out["waypoints"] = list;
    write_text_file(out_path, out.dump(2) + "\n");
    if (!weights_path.empty()) odx::save_fusion_model(model, weights_path);

    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        std::cout << "wp[" << i << "] = (" << format_fixed(waypoints[i].x, 6) << ", "
                  << format_fixed(waypoints[i].y, 6) << ")\n";
    }
    std::cout << "wrote " << waypoints.size() << " waypoints to " << out_path << "\n";
    return 0;
}

template <typename Fn>
int guarded(Fn&& body) {
    try {
        return body();
    } catch (const UsageError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 64;
    } catch (const std::domain_error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"odx: OpenDRIVE maps, scenario rollouts, scoring and sensor fusion"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 1 domain failure, 2 unreadable input, 64 usage.\n"
               "Set ODX_LOG=debug|info|warn|error|off to control library logging.");

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON run configuration (timestep, expert, vehicle, infractions, penalties, "
                   "fusion sizes)");

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "Parse a map, validate links, report issues");
    std::string parse_map;
    bool parse_strict = false;
    std::string parse_report;
    parse_cmd->add_option("map", parse_map, "OpenDRIVE .xodr file")->required();
    parse_cmd->add_flag("--strict", parse_strict, "Treat recoverable oddities as errors");
    parse_cmd->add_option("--report", parse_report, "Write a JSON issue report to this path");

    // vectorize
    auto* vec_cmd = app.add_subcommand("vectorize", "Window lane chunks around a pose as JSONL");
    std::string vec_map, vec_ego, vec_out = "lanes.jsonl";
    double vec_ds = 1.0;
    vec_cmd->add_option("map", vec_map, "OpenDRIVE .xodr file")->required();
    vec_cmd->add_option("--ego", vec_ego, "Ego pose as x,y,heading (heading in radians)")
        ->required();
    vec_cmd->add_option("--ds", vec_ds, "Sampling step in meters")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    vec_cmd->add_option("--out", vec_out, "Output JSONL path")->capture_default_str();

    // raster
    auto* raster_cmd = app.add_subcommand("raster", "Rasterize windowed lanes into a BEV grid");
    std::string raster_map, raster_ego, raster_out = "bev.pgm", raster_tensor;
    int raster_resolution = 0;
    raster_cmd->add_option("map", raster_map, "OpenDRIVE .xodr file")->required();
    raster_cmd->add_option("--ego", raster_ego, "Ego pose as x,y,heading (heading in radians)")
        ->required();
    raster_cmd->add_option("--resolution", raster_resolution,
                           "Grid side in pixels over the same 28 m window (default 256)")
        ->check(CLI::PositiveNumber);
    raster_cmd->add_option("--out", raster_out, "Output PGM path")->capture_default_str();
    raster_cmd->add_option("--tensor", raster_tensor, "Also dump the raw float grid here");

    // run
    auto* run_cmd = app.add_subcommand("run", "Roll out a scenario and persist the trace");
    std::string run_scenario_path, run_policy = "full", run_out = "runs/out";
    std::uint64_t run_seed = 0;
    run_cmd->add_option("scenario", run_scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("--policy", run_policy, "Driving policy")
        ->capture_default_str()
        ->check(CLI::IsMember({"full", "baseline"}));
    run_cmd->add_option("--seed", run_seed, "Override the scenario seed");
    bool run_sensors = false;
    run_cmd->add_flag("--sensors", run_sensors,
                      "Also capture lidar.bin and radar.csv from the mid-rollout snapshot");
    run_cmd->add_option("--out", run_out, "Output directory for trace/events/meta")
        ->capture_default_str();

    // score
    auto* score_cmd = app.add_subcommand("score", "Score persisted runs into a CSV report");
    std::string score_dir, score_out = "report.csv", score_json, score_plot;
    score_cmd->add_option("runs", score_dir, "Run directory, or a directory of run directories")
        ->required();
    score_cmd->add_option("--out", score_out, "Output CSV path")->capture_default_str();
    score_cmd->add_option("--json", score_json, "Also write the full-precision JSON report");
    score_cmd->add_option("--plot", score_plot, "Write a grouped bar chart SVG");

    // fuse-demo
    auto* fuse_cmd =
        app.add_subcommand("fuse-demo", "Run the toy fusion forward pass on captured inputs");
    std::string fuse_lanes, fuse_lidar, fuse_radar, fuse_goal = "10,0";
    std::string fuse_out = "waypoints.json", fuse_weights;
    std::uint64_t fuse_seed = 0;
    fuse_cmd->add_option("lanes", fuse_lanes, "Lane chunks JSONL (see vectorize)")->required();
    fuse_cmd->add_option("lidar", fuse_lidar, "Lidar point dump (LPC00001)")->required();
    fuse_cmd->add_option("radar", fuse_radar, "Radar returns CSV")->required();
    fuse_cmd->add_option("--seed", fuse_seed, "Weight initialization seed")
        ->capture_default_str();
    fuse_cmd->add_option("--goal", fuse_goal, "Goal point as x,y in the ego frame")
        ->capture_default_str();
    fuse_cmd->add_option("--out", fuse_out, "Output waypoints JSON path")->capture_default_str();
    fuse_cmd->add_option("--weights", fuse_weights, "Also save the initialized weights blob");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        int code = app.exit(error);
        return code == 0 ? 0 : 64;
    }

    return guarded([&]() -> int {
        odx::RunConfig config = load_config_or_default(config_path);
        if (*parse_cmd) return cmd_parse(parse_map, parse_strict, parse_report);
        if (*vec_cmd) return cmd_vectorize(vec_map, vec_ego, vec_ds, vec_out);
        if (*raster_cmd)
            return cmd_raster(raster_map, raster_ego, raster_resolution, raster_out,
                              raster_tensor);
        if (*run_cmd)
            return cmd_run(run_scenario_path, run_policy, run_cmd->count("--seed") > 0, run_seed,
                           run_sensors, run_out, config);
        if (*score_cmd) return cmd_score(score_dir, score_out, score_json, score_plot, config);
        if (*fuse_cmd)
            return cmd_fuse_demo(fuse_lanes, fuse_lidar, fuse_radar, fuse_seed, fuse_goal,
                                 fuse_out, fuse_weights, config);
        return 64;
    });
}
