#include "odx/opendrive_parser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "odx/log.hpp"

namespace odx {

namespace {

namespace pt = boost::property_tree;

struct ParserState {
    std::vector<ParseIssue>* issues;
    bool strict = false;

    void error(const std::string& locator, const std::string& message) {
        issues->push_back({IssueSeverity::kError, locator, message});
    }
    void warning(const std::string& locator, const std::string& message) {
        issues->push_back({IssueSeverity::kWarning, locator, message});
    }
    // Unsupported geometry kinds escalate to errors in strict mode.
    void geometry_warning(const std::string& locator, const std::string& message) {
        issues->push_back({strict ? IssueSeverity::kError : IssueSeverity::kWarning, locator,
                           message});
    }
};

std::optional<std::string> attr(const pt::ptree& node, const char* name) {
    const auto child = node.get_child_optional(std::string("<xmlattr>.") + name);
    if (!child) return std::nullopt;
    return child->get_value<std::string>();
}

// First present attribute among version-dependent synonyms.
std::optional<std::string> attr_any(const pt::ptree& node,
                                    std::initializer_list<const char*> names) {
    for (const char* name : names) {
        if (auto v = attr(node, name)) return v;
    }
    return std::nullopt;
}

std::optional<double> attr_double(const pt::ptree& node, const char* name) {
    const auto raw = attr(node, name);
    if (!raw) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(*raw, &used);
        if (used == 0) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<int> attr_int(const pt::ptree& node, const char* name) {
    const auto raw = attr(node, name);
    if (!raw) return std::nullopt;
    try {
        return std::stoi(*raw);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

LaneChange lane_change_from_string(const std::string& v) {
    if (v == "both") return LaneChange::kBoth;
    // OpenDRIVE: "increase" allows crossing toward increasing t (left),
    // "decrease" toward decreasing t (right).
    if (v == "increase") return LaneChange::kLeft;
    if (v == "decrease") return LaneChange::kRight;
    return LaneChange::kNone;
}

std::optional<RoadLink> parse_road_link_end(const pt::ptree& node, const std::string& locator,
                                            ParserState& state) {
    const auto type = attr(node, "elementType");
    const auto id = attr_int(node, "elementId");
    if (!id) {
        state.error(locator, "link is missing elementId");
        return std::nullopt;
    }
    RoadLink link;
    link.element_id = *id;
    link.is_junction = type && *type == "junction";
    return link;
}

void parse_plan_view(const pt::ptree& plan_view, Road& road, const std::string& locator,
                     ParserState& state) {
    int ordinal = 0;
    for (const auto& [name, node] : plan_view) {
        if (name == "<xmlattr>") continue;
        if (name != "geometry") {
            state.warning(locator + "/" + name, "unknown element <" + name + "> ignored");
            continue;
        }
        ++ordinal;
        const std::string geo_loc = locator + "/geometry[" + std::to_string(ordinal) + "]";

        const auto s = attr_double(node, "s");
        const auto x = attr_double(node, "x");
        const auto y = attr_double(node, "y");
        const auto hdg = attr_double(node, "hdg");
        const auto length = attr_double(node, "length");
        if (!s || !x || !y || !hdg || !length) {
            state.error(geo_loc, "geometry is missing one of s/x/y/hdg/length");
            continue;
        }
        if (*length <= 0.0) {
            state.error(geo_loc, "geometry length must be positive");
            continue;
        }

        bool shape_seen = false;
        for (const auto& [shape, shape_node] : node) {
            if (shape == "<xmlattr>") continue;
            if (shape_seen) {
                state.warning(geo_loc + "/" + shape, "extra geometry shape ignored");
                continue;
            }
            if (shape == "line") {
                road.plan_view.push_back(make_line(*s, *x, *y, *hdg, *length));
                shape_seen = true;
            } else if (shape == "arc") {
                const auto curvature = attr_double(shape_node, "curvature");
                if (!curvature || *curvature == 0.0) {
                    state.error(geo_loc + "/arc", "arc requires a nonzero curvature");
                } else {
                    road.plan_view.push_back(make_arc(*s, *x, *y, *hdg, *length, *curvature));
                }
                shape_seen = true;
            } else if (shape == "paramPoly3") {
                ParamPoly3Data poly;
                poly.au = attr_double(shape_node, "aU").value_or(0.0);
                poly.bu = attr_double(shape_node, "bU").value_or(0.0);
                poly.cu = attr_double(shape_node, "cU").value_or(0.0);
                poly.du = attr_double(shape_node, "dU").value_or(0.0);
                poly.av = attr_double(shape_node, "aV").value_or(0.0);
                poly.bv = attr_double(shape_node, "bV").value_or(0.0);
                poly.cv = attr_double(shape_node, "cV").value_or(0.0);
                poly.dv = attr_double(shape_node, "dV").value_or(0.0);
                // pRange may sit on the shape (1.5+) or the geometry node.
                const auto p_range =
                    attr(shape_node, "pRange") ? attr(shape_node, "pRange") : attr(node, "pRange");
                poly.normalized = !p_range || *p_range != "arcLength";
                road.plan_view.push_back(make_param_poly3(*s, *x, *y, *hdg, *length, poly));
                shape_seen = true;
            } else if (shape == "spiral") {
                const double k0 = attr_double(shape_node, "curvStart").value_or(0.0);
                const double k1 = attr_double(shape_node, "curvEnd").value_or(0.0);
                state.geometry_warning(geo_loc + "/spiral",
                                       "spiral approximated by constant-curvature chords");
                auto chords = expand_spiral(*s, *x, *y, *hdg, *length, k0, k1);
                for (auto& chord : chords) road.plan_view.push_back(std::move(chord));
                shape_seen = true;
            } else {
                state.geometry_warning(geo_loc + "/" + shape,
                                       "unsupported geometry kind '" + shape + "' skipped");
                shape_seen = true;
            }
        }
        if (!shape_seen) state.error(geo_loc, "geometry has no shape element");
    }
}

Lane parse_lane(const pt::ptree& node, bool in_junction, const std::string& locator,
                ParserState& state) {
    Lane lane;
    const auto id = attr_int(node, "id");
    if (!id) {
        state.error(locator, "lane is missing id");
    } else {
        lane.id = *id;
    }
    lane.type = attr(node, "type").value_or("none");
    lane.junction_member = in_junction;

    for (const auto& [name, child] : node) {
        if (name == "<xmlattr>") continue;
        if (name == "width") {
            LaneWidthPoly poly;
            // 1.4 exports use offset, 1.5+ sOffset.
            const auto s_offset = attr_any(child, {"sOffset", "offset"});
            poly.s_offset = s_offset ? std::stod(*s_offset) : 0.0;
            poly.a = attr_double(child, "a").value_or(0.0);
            poly.b = attr_double(child, "b").value_or(0.0);
            poly.c = attr_double(child, "c").value_or(0.0);
            poly.d = attr_double(child, "d").value_or(0.0);
            lane.width_polys.push_back(poly);
        } else if (name == "roadMark") {
            if (const auto change = attr(child, "laneChange")) {
                lane.lane_change = lane_change_from_string(*change);
            }
        } else if (name == "link") {
            for (const auto& [link_name, link_node] : child) {
                if (link_name == "predecessor") {
                    lane.predecessor_id = attr_int(link_node, "id");
                } else if (link_name == "successor") {
                    lane.successor_id = attr_int(link_node, "id");
                }
            }
        } else if (name == "speed" || name == "material" || name == "userData" ||
                   name == "height" || name == "access" || name == "rule" || name == "border") {
            // Known records outside this model.
        } else {
            state.warning(locator + "/" + name, "unknown element <" + name + "> ignored");
        }
    }

    std::stable_sort(lane.width_polys.begin(), lane.width_polys.end(),
                     [](const LaneWidthPoly& a, const LaneWidthPoly& b) {
                         return a.s_offset < b.s_offset;
                     });
    return lane;
}

void parse_lanes(const pt::ptree& lanes_node, Road& road, const std::string& locator,
                 ParserState& state) {
    const bool in_junction = road.junction_id.has_value();
    int ordinal = 0;
    for (const auto& [name, section_node] : lanes_node) {
        if (name == "<xmlattr>") continue;
        if (name == "laneOffset") {
            state.warning(locator + "/laneOffset", "laneOffset record ignored");
            continue;
        }
        if (name != "laneSection") {
            state.warning(locator + "/" + name, "unknown element <" + name + "> ignored");
            continue;
        }
        ++ordinal;
        const std::string sec_loc = locator + "/laneSection[" + std::to_string(ordinal) + "]";
        LaneSection section;
        const auto s = attr_double(section_node, "s");
        if (!s) {
            state.error(sec_loc, "laneSection is missing s");
            continue;
        }
        section.s0 = *s;

        for (const auto& [side, side_node] : section_node) {
            if (side == "<xmlattr>") continue;
            if (side != "left" && side != "center" && side != "right") {
                state.warning(sec_loc + "/" + side, "unknown element <" + side + "> ignored");
                continue;
            }
            int lane_ordinal = 0;
            for (const auto& [lane_name, lane_node] : side_node) {
                if (lane_name == "<xmlattr>") continue;
                if (lane_name != "lane") {
                    state.warning(sec_loc + "/" + side + "/" + lane_name,
                                  "unknown element <" + lane_name + "> ignored");
                    continue;
                }
                ++lane_ordinal;
                Lane lane = parse_lane(lane_node, in_junction,
                                       sec_loc + "/" + side + "/lane[" +
                                           std::to_string(lane_ordinal) + "]",
                                       state);
                if (lane.id != 0) section.lanes.push_back(std::move(lane));
            }
        }

        std::stable_sort(section.lanes.begin(), section.lanes.end(),
                         [](const Lane& a, const Lane& b) { return a.id > b.id; });
        road.lane_sections.push_back(std::move(section));
    }
    std::stable_sort(road.lane_sections.begin(), road.lane_sections.end(),
                     [](const LaneSection& a, const LaneSection& b) { return a.s0 < b.s0; });
}

Road parse_road(const pt::ptree& node, const std::string& locator, ParserState& state) {
    Road road;
    const auto id = attr_int(node, "id");
    if (!id) {
        state.error(locator, "road is missing id");
    } else {
        road.id = *id;
    }
    road.name = attr(node, "name").value_or("");
    const auto length = attr_double(node, "length");
    if (!length) {
        state.error(locator, "road is missing length");
    } else {
        road.length = *length;
    }
    const auto junction = attr(node, "junction");
    if (junction && *junction != "-1") {
        try {
            road.junction_id = std::stoi(*junction);
        } catch (const std::exception&) {
            state.error(locator, "road junction attribute is not an id");
        }
    }

    for (const auto& [name, child] : node) {
        if (name == "<xmlattr>") continue;
        if (name == "link") {
            for (const auto& [link_name, link_node] : child) {
                if (link_name == "predecessor") {
                    road.predecessor =
                        parse_road_link_end(link_node, locator + "/link/predecessor", state);
                } else if (link_name == "successor") {
                    road.successor =
                        parse_road_link_end(link_node, locator + "/link/successor", state);
                }
            }
        } else if (name == "planView") {
            parse_plan_view(child, road, locator + "/planView", state);
        } else if (name == "lanes") {
            parse_lanes(child, road, locator + "/lanes", state);
        } else if (name == "type" || name == "elevationProfile" || name == "lateralProfile" ||
                   name == "objects" || name == "signals" || name == "surface" ||
                   name == "userData") {
            state.warning(locator + "/" + name, "unsupported element ignored");
        } else {
            state.warning(locator + "/" + name, "unknown element <" + name + "> ignored");
        }
    }

    // Plan-view contiguity in s; tolerate tiny export noise.
    for (std::size_t i = 1; i < road.plan_view.size(); ++i) {
        const GeometrySegment& prev = road.plan_view[i - 1];
        const double expected = prev.s0 + prev.length;
        if (std::abs(road.plan_view[i].s0 - expected) > 1e-6) {
            state.warning(locator + "/planView",
                          "geometry segments are not contiguous in s near s=" +
                              std::to_string(expected));
        }
    }
    return road;
}

Junction parse_junction(const pt::ptree& node, const std::string& locator, ParserState& state) {
    Junction junction;
    const auto id = attr_int(node, "id");
    if (!id) {
        state.error(locator, "junction is missing id");
    } else {
        junction.id = *id;
    }
    junction.name = attr(node, "name").value_or("");
    for (const auto& [name, child] : node) {
        if (name == "<xmlattr>") continue;
        if (name == "connection") {
            if (const auto road_id = attr_int(child, "connectingRoad")) {
                junction.connecting_road_ids.push_back(*road_id);
            } else {
                state.error(locator + "/connection", "connection is missing connectingRoad");
            }
        } else if (name != "priority" && name != "controller" && name != "userData") {
            state.warning(locator + "/" + name, "unknown element <" + name + "> ignored");
        }
    }
    return junction;
}

// Finds where a cubic width record first dips below zero on [0, extent];
// scan then bisect the sign change.
std::optional<double> first_negative_width(const LaneWidthPoly& poly, double extent) {
    constexpr int kScanSteps = 256;
    if (poly.eval(0.0) < -1e-12) return 0.0;
    double prev_s = 0.0;
    double prev_w = poly.eval(0.0);
    for (int i = 1; i <= kScanSteps; ++i) {
        const double s = extent * static_cast<double>(i) / kScanSteps;
        const double w = poly.eval(s);
        if (prev_w >= -1e-12 && w < -1e-12) {
            double lo = prev_s;
            double hi = s;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (poly.eval(mid) < -1e-12 ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_s = s;
        prev_w = w;
    }
    return std::nullopt;
}

}  // namespace

bool ParseResult::ok() const {
    return std::none_of(issues.begin(), issues.end(), [](const ParseIssue& issue) {
        return issue.severity == IssueSeverity::kError;
    });
}

const char* severity_name(IssueSeverity severity) {
    return severity == IssueSeverity::kError ? "error" : "warning";
}

ParseResult parse_opendrive(const std::string& xml_text, bool strict) {
    pt::ptree doc;
    try {
        std::istringstream stream(xml_text);
        pt::read_xml(stream, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("malformed XML: ") + e.what());
    }

    const auto root = doc.get_child_optional("OpenDRIVE");
    if (!root) throw ParseError("missing OpenDRIVE root element");

    ParseResult result;
    ParserState state{&result.issues, strict};

    int road_ordinal = 0;
    int junction_ordinal = 0;
    for (const auto& [name, node] : *root) {
        if (name == "<xmlattr>" || name == "header") continue;
        if (name == "road") {
            ++road_ordinal;
            result.network.roads.push_back(
                parse_road(node, "/OpenDRIVE/road[" + std::to_string(road_ordinal) + "]", state));
        } else if (name == "junction") {
            ++junction_ordinal;
            result.network.junctions.push_back(parse_junction(
                node, "/OpenDRIVE/junction[" + std::to_string(junction_ordinal) + "]", state));
        } else if (name == "controller") {
            // Signal controllers are outside this model.
        } else {
            state.warning("/OpenDRIVE/" + name, "unknown element <" + name + "> ignored");
        }
    }

    if (strict && !result.ok()) {
        result.network = RoadNetwork{};
        log_warn("strict parse rejected the document");
    }
    return result;
}

ParseResult parse_opendrive_file(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_opendrive(buffer.str(), strict);
}

std::vector<ParseIssue> validate_network(const RoadNetwork& network) {
    std::vector<ParseIssue> issues;
    const auto road_loc = [](const Road& road) {
        return "/OpenDRIVE/road[id=" + std::to_string(road.id) + "]";
    };

    for (std::size_t i = 0; i < network.roads.size(); ++i) {
        for (std::size_t j = i + 1; j < network.roads.size(); ++j) {
            if (network.roads[i].id == network.roads[j].id) {
                issues.push_back({IssueSeverity::kError, road_loc(network.roads[i]),
                                  "duplicate road id"});
            }
        }
    }

    for (const Road& road : network.roads) {
        const auto check_link = [&](const std::optional<RoadLink>& link, const char* which) {
            if (!link) return;
            if (link->is_junction) {
                const bool found = std::any_of(
                    network.junctions.begin(), network.junctions.end(),
                    [&](const Junction& junction) { return junction.id == link->element_id; });
                if (!found) {
                    issues.push_back({IssueSeverity::kError, road_loc(road) + "/link/" + which,
                                      std::string(which) + " junction " +
                                          std::to_string(link->element_id) + " does not exist"});
                }
            } else if (network.find_road(link->element_id) == nullptr) {
                issues.push_back({IssueSeverity::kError, road_loc(road) + "/link/" + which,
                                  std::string(which) + " road " +
                                      std::to_string(link->element_id) + " does not exist"});
            }
        };
        check_link(road.predecessor, "predecessor");
        check_link(road.successor, "successor");

        for (std::size_t g = 0; g < road.plan_view.size(); ++g) {
            if (road.plan_view[g].length <= 0.0) {
                issues.push_back({IssueSeverity::kError,
                                  road_loc(road) + "/planView/geometry[" + std::to_string(g + 1) +
                                      "]",
                                  "zero-length geometry segment"});
            }
            if (g > 0) {
                const GeometrySegment& prev = road.plan_view[g - 1];
                const Vec2 gap = road.plan_view[g].eval(0.0).position - prev.eval(prev.length).position;
                if (gap.norm() > 1e-6) {
                    issues.push_back({IssueSeverity::kWarning,
                                      road_loc(road) + "/planView/geometry[" +
                                          std::to_string(g + 1) + "]",
                                      "plan view position gap of " + std::to_string(gap.norm()) +
                                          " m"});
                }
            }
        }

        for (std::size_t sec = 0; sec < road.lane_sections.size(); ++sec) {
            const LaneSection& section = road.lane_sections[sec];
            const std::string sec_loc =
                road_loc(road) + "/lanes/laneSection[" + std::to_string(sec + 1) + "]";
            if (sec > 0 && section.s0 <= road.lane_sections[sec - 1].s0) {
                issues.push_back(
                    {IssueSeverity::kError, sec_loc, "lane sections overlap in s"});
            }
            const double extent = road.section_end(sec) - section.s0;

            for (const Lane& lane : section.lanes) {
                const std::string lane_loc =
                    sec_loc + "/lane[id=" + std::to_string(lane.id) + "]";
                for (std::size_t w = 0; w < lane.width_polys.size(); ++w) {
                    const LaneWidthPoly& poly = lane.width_polys[w];
                    const double rec_end = w + 1 < lane.width_polys.size()
                                               ? lane.width_polys[w + 1].s_offset
                                               : extent;
                    const double span = rec_end - poly.s_offset;
                    if (span <= 0.0) continue;
                    LaneWidthPoly local = poly;
                    local.s_offset = 0.0;
                    if (const auto s_neg = first_negative_width(local, span)) {
                        issues.push_back(
                            {IssueSeverity::kError, lane_loc + "/width[" + std::to_string(w + 1) +
                                                        "]",
                             "lane width goes negative at section-local s=" +
                                 std::to_string(poly.s_offset + *s_neg)});
                    }
                }

                const auto check_lane_link = [&](std::optional<int> target, bool forward) {
                    if (!target) return;
                    // Only in-road section-to-section links can be resolved
                    // without traversing road links; check those.
                    const std::size_t neighbor_index = forward ? sec + 1 : sec - 1;
                    const bool has_neighbor = forward ? sec + 1 < road.lane_sections.size()
                                                      : sec > 0;
                    if (!has_neighbor) return;
                    const LaneSection& neighbor = road.lane_sections[neighbor_index];
                    if (neighbor.find_lane(*target) == nullptr) {
                        issues.push_back({IssueSeverity::kError, lane_loc + "/link",
                                          std::string(forward ? "successor" : "predecessor") +
                                              " lane " + std::to_string(*target) +
                                              " missing from adjacent section"});
                    }
                };
                check_lane_link(lane.successor_id, true);
                check_lane_link(lane.predecessor_id, false);
            }
        }
    }
    return issues;
}

NetworkSummary summarize(const RoadNetwork& network) {
    NetworkSummary summary;
    summary.road_count = network.roads.size();
    summary.junction_count = network.junctions.size();
    summary.driving_lane_count = network.driving_lane_count();
    summary.total_centerline_length_m = network.total_centerline_length();
    for (const Road& road : network.roads) {
        RoadSummary rs;
        rs.id = road.id;
        rs.length = road.length;
        rs.sections = road.lane_sections.size();
        for (const LaneSection& section : road.lane_sections) {
            rs.total_lanes += section.lanes.size();
            for (const Lane& lane : section.lanes) {
                if (lane.is_driving()) ++rs.driving_lanes;
            }
        }
        summary.roads.push_back(rs);
    }
    return summary;
}

nlohmann::json summary_to_json(const NetworkSummary& summary) {
    nlohmann::json roads = nlohmann::json::array();
    for (const RoadSummary& rs : summary.roads) {
        roads.push_back({{"id", rs.id},
                         {"length", rs.length},
                         {"sections", rs.sections},
                         {"driving_lanes", rs.driving_lanes},
                         {"total_lanes", rs.total_lanes}});
    }
    return {{"road_count", summary.road_count},
            {"junction_count", summary.junction_count},
            {"driving_lane_count", summary.driving_lane_count},
            {"total_centerline_length_m", summary.total_centerline_length_m},
            {"roads", roads}};
}

NetworkSummary summary_from_json(const nlohmann::json& j) {
    NetworkSummary summary;
    summary.road_count = j.at("road_count").get<std::size_t>();
    summary.junction_count = j.at("junction_count").get<std::size_t>();
    summary.driving_lane_count = j.at("driving_lane_count").get<std::size_t>();
    summary.total_centerline_length_m = j.at("total_centerline_length_m").get<double>();
    for (const auto& rj : j.at("roads")) {
        RoadSummary rs;
        rs.id = rj.at("id").get<int>();
        rs.length = rj.at("length").get<double>();
        rs.sections = rj.at("sections").get<std::size_t>();
        rs.driving_lanes = rj.at("driving_lanes").get<std::size_t>();
        rs.total_lanes = rj.at("total_lanes").get<std::size_t>();
        summary.roads.push_back(rs);
    }
    return summary;
}

}  // namespace odx
