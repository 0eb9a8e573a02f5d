#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "odx/agent.hpp"
#include "odx/sim_harness.hpp"

namespace odx {

// Multiplicative penalty weights per event kind. Kinds without an entry do
// not scale the penalty: standing blocked already truncates completion, and
// leaving the route already costs progress, so neither gets a coefficient
// unless a config adds one.
struct PenaltyConfig {
    std::map<InfractionKind, double> coefficients = {
        {InfractionKind::kCollisionVehicle, 0.60},
        {InfractionKind::kCollisionStatic, 0.65},
    };
};

// Percent of the route covered by the farthest monotone projection of the
// ego track onto the route polyline. Driving backwards never lowers it, and
// a rollout that reached its goal counts as exactly 100. Throws
// std::invalid_argument on an empty trace or a degenerate polyline.
double route_completion(const std::vector<WorldSnapshot>& trace,
                        const std::vector<Vec2>& route_polyline,
                        bool goal_reached = false);

// Product of the coefficients of all scored events; 1.0 when nothing counts.
double infraction_penalty(const std::vector<InfractionEvent>& events,
                          const PenaltyConfig& config = {});

// Final per-route score: completion percent scaled by the penalty product.
// Inputs outside [0, 100] and [0, 1] throw std::domain_error.
double driving_score(double completion_percent, double penalty);

// Events per kilometer; zero or negative distance throws std::domain_error.
double infractions_per_km(std::size_t event_count, double kilometers);

struct RouteScore {
    std::string route_id;
    std::string policy_name;
    double completion = 0.0;           // percent
    double penalty = 1.0;              // product in [0, 1]
    double score = 0.0;                // completion * penalty
    double driven_km = 0.0;
    std::size_t infraction_count = 0;  // all events, whether weighted or not
    std::map<InfractionKind, int> counts;
};

RouteScore score_route(const std::vector<WorldSnapshot>& trace,
                       const std::vector<InfractionEvent>& events, const RunMeta& meta,
                       const PenaltyConfig& config = {});

struct SuiteScore {
    std::vector<RouteScore> routes;
    double mean_score = 0.0;            // mean of per-route scores
    double mean_completion = 0.0;
    double infractions_per_km = 0.0;    // total events over total distance
};

// Mean of the per-route scores (not the score of the means) and the pooled
// infraction rate. Throws std::invalid_argument when routes is empty and
// std::domain_error when no distance was driven at all.
SuiteScore aggregate_scores(const std::vector<RouteScore>& routes);

// CSV with exactly the columns route,DS,RC,infra_per_km: one row per route
// and a closing "overall" row with the aggregate values.
void write_score_csv(const SuiteScore& suite, const std::string& path);

// Full-precision JSON twin of the CSV, including per-kind counts.
void write_score_json(const SuiteScore& suite, const std::string& path);

}  // namespace odx
