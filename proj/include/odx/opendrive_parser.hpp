#ifndef ODX_OPENDRIVE_PARSER_HPP_
#define ODX_OPENDRIVE_PARSER_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "odx/map_model.hpp"

namespace odx {

// Input text is not well-formed XML (or the OpenDRIVE root is missing).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IssueSeverity { kWarning, kError };

struct ParseIssue {
    IssueSeverity severity = IssueSeverity::kWarning;
    std::string locator;  // xpath-like, e.g. /OpenDRIVE/road[2]/planView/geometry[1]
    std::string message;
};

struct ParseResult {
    RoadNetwork network;
    std::vector<ParseIssue> issues;

    bool ok() const;  // true iff no error-severity issue
};

// Parses OpenDRIVE XML into a RoadNetwork. Unknown or unsupported elements
// produce warning issues, missing mandatory attributes produce error issues.
// In strict mode warnings about unsupported geometry kinds escalate to
// errors and an erroneous result comes back with an empty network.
// Accepts OpenDRIVE 1.4-1.6 attribute synonyms. Throws ParseError when the
// text is not well-formed XML.
ParseResult parse_opendrive(const std::string& xml_text, bool strict = false);
ParseResult parse_opendrive_file(const std::string& path, bool strict = false);

// Diagnostics on an already-built network: dangling links, zero-length
// geometry, negative lane widths (with the offending s), overlapping lane
// sections. Never throws.
std::vector<ParseIssue> validate_network(const RoadNetwork& network);

// Compact description of a parsed network; round-trips through JSON.
struct RoadSummary {
    int id = 0;
    double length = 0.0;
    std::size_t sections = 0;
    std::size_t driving_lanes = 0;
    std::size_t total_lanes = 0;
};

struct NetworkSummary {
    std::size_t road_count = 0;
    std::size_t junction_count = 0;
    std::size_t driving_lane_count = 0;
    double total_centerline_length_m = 0.0;
    std::vector<RoadSummary> roads;
};

NetworkSummary summarize(const RoadNetwork& network);
nlohmann::json summary_to_json(const NetworkSummary& summary);
NetworkSummary summary_from_json(const nlohmann::json& j);

const char* severity_name(IssueSeverity severity);

}  // namespace odx

#endif  // ODX_OPENDRIVE_PARSER_HPP_
