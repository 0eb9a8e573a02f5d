#include "odx/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace odx {

namespace {

using json = nlohmann::ordered_json;

// Arclength of the projection of `p` onto the polyline, using per-vertex
// cumulative lengths.
double projected_arclength(const Vec2& p, const std::vector<Vec2>& poly,
                           const std::vector<double>& cumulative) {
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec2 ab = poly[i + 1] - poly[i];
        const double len2 = ab.squared_norm();
        double t = 0.0;
        if (len2 > 0.0) t = std::clamp((p - poly[i]).dot(ab) / len2, 0.0, 1.0);
        const Vec2 q = poly[i] + ab * t;
        const double d2 = (p - q).squared_norm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_s = cumulative[i] + std::sqrt(len2) * t;
        }
    }
    return best_s;
}

}  // namespace

double route_completion(const std::vector<WorldSnapshot>& trace,
                        const std::vector<Vec2>& route_polyline, bool goal_reached) {
    if (trace.empty()) throw std::invalid_argument("route_completion: empty trace");
    if (route_polyline.size() < 2) {
        throw std::invalid_argument("route_completion: route needs at least two points");
    }
    std::vector<double> cumulative(route_polyline.size(), 0.0);
    for (std::size_t i = 1; i < route_polyline.size(); ++i) {
        cumulative[i] =
            cumulative[i - 1] + (route_polyline[i] - route_polyline[i - 1]).norm();
    }
    const double total = cumulative.back();
    if (!(total > 0.0)) {
        throw std::invalid_argument("route_completion: route has zero length");
    }
    if (goal_reached) return 100.0;

    double progress = 0.0;
    for (const WorldSnapshot& snap : trace) {
        progress = std::max(
            progress, projected_arclength(snap.ego().position, route_polyline, cumulative));
    }
    return 100.0 * std::min(progress / total, 1.0);
}

double infraction_penalty(const std::vector<InfractionEvent>& events,
                          const PenaltyConfig& config) {
    double penalty = 1.0;
    for (const InfractionEvent& e : events) {
        const auto it = config.coefficients.find(e.kind);
        if (it != config.coefficients.end()) penalty *= it->second;
    }
    return penalty;
}

double driving_score(double completion_percent, double penalty) {
    if (!(completion_percent >= 0.0) || completion_percent > 100.0 + 1e-9) {
        throw std::domain_error("driving_score: completion must lie in [0, 100]");
    }
    if (!(penalty >= 0.0) || penalty > 1.0 + 1e-12) {
        throw std::domain_error("driving_score: penalty must lie in [0, 1]");
    }
    return completion_percent * penalty;
}

double infractions_per_km(std::size_t event_count, double kilometers) {
    if (!(kilometers > 0.0)) {
        throw std::domain_error("infractions_per_km: distance must be positive");
    }
    return static_cast<double>(event_count) / kilometers;
}

RouteScore score_route(const std::vector<WorldSnapshot>& trace,
                       const std::vector<InfractionEvent>& events, const RunMeta& meta,
                       const PenaltyConfig& config) {
    RouteScore score;
    score.route_id = meta.scenario_name;
    score.policy_name = meta.policy_name;
    score.completion = route_completion(trace, meta.route_polyline, meta.goal_reached);
    score.penalty = infraction_penalty(events, config);
    score.score = driving_score(score.completion, score.penalty);
    score.driven_km = meta.ego_distance / 1000.0;
    score.infraction_count = events.size();
    for (const InfractionEvent& e : events) ++score.counts[e.kind];
    return score;
}

SuiteScore aggregate_scores(const std::vector<RouteScore>& routes) {
    if (routes.empty()) throw std::invalid_argument("aggregate_scores: no routes");
    SuiteScore suite;
    suite.routes = routes;
    double total_km = 0.0;
    std::size_t total_events = 0;
    for (const RouteScore& r : routes) {
        suite.mean_score += r.score;
        suite.mean_completion += r.completion;
        total_km += r.driven_km;
        total_events += r.infraction_count;
    }
    suite.mean_score /= static_cast<double>(routes.size());
    suite.mean_completion /= static_cast<double>(routes.size());
    suite.infractions_per_km = infractions_per_km(total_events, total_km);
    return suite;
}

void write_score_csv(const SuiteScore& suite, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "route,DS,RC,infra_per_km\n";
    out << std::fixed;
    for (const RouteScore& r : suite.routes) {
        out << r.route_id << ',' << std::setprecision(2) << r.score << ','
            << r.completion << ',' << std::setprecision(4)
            << (r.driven_km > 0.0 ? r.infraction_count / r.driven_km : 0.0) << '\n';
    }
    out << "overall," << std::setprecision(2) << suite.mean_score << ','
        << suite.mean_completion << ',' << std::setprecision(4)
        << suite.infractions_per_km << '\n';
    if (!out) throw std::runtime_error("short write to " + path);
}

void write_score_json(const SuiteScore& suite, const std::string& path) {
    json j;
    j["routes"] = json::array();
    for (const RouteScore& r : suite.routes) {
        json e;
        e["route"] = r.route_id;
        e["policy"] = r.policy_name;
        e["DS"] = r.score;
        e["RC"] = r.completion;
        e["penalty"] = r.penalty;
        e["driven_km"] = r.driven_km;
        e["infractions"] = r.infraction_count;
        json counts;
        for (const auto& [kind, n] : r.counts) counts[infraction_kind_name(kind)] = n;
        e["counts"] = counts;
        j["routes"].push_back(std::move(e));
    }
    j["mean_DS"] = suite.mean_score;
    j["mean_RC"] = suite.mean_completion;
    j["infra_per_km"] = suite.infractions_per_km;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace odx
