#ifndef COARSEKIT_JSON_IO_HPP
#define COARSEKIT_JSON_IO_HPP

#include <string>

#include "json.hpp"

#include "coarsekit/growth.hpp"
#include "coarsekit/metric_core.hpp"
#include "coarsekit/rips.hpp"
#include "coarsekit/splitting.hpp"

namespace coarsekit {

using json = nlohmann::json;

// Space files: {"label": str, "points": [id...], "metric": {...}} where the
// metric is one of
//   {"kind": "table", "rows": [[...]]}
//   {"kind": "graph", "edges": [[i, j, w]...]}   (shortest-path metric)
//   {"kind": "line", "coords": [x...]}
// Numeric entries may be numbers or exact "p/q" strings.
FiniteMetricSpace space_from_json(const json& j);
json space_to_json(const FiniteMetricSpace& space);

FiniteMetricSpace load_space(const std::string& path);
void save_space(const FiniteMetricSpace& space, const std::string& path);

// Map files: {"domain": space, "codomain": space, "image": {id: id, ...}}.
MapSample map_from_json(const json& j);

json complex_to_json(const Rips2Complex& cx);

// Presentation files: {"letters": [...], "relators": [[letter, exp]...],
//  "evaluation": {"family": spec, "images": {letter: word}}, "convention": ...}.
Presentation presentation_from_json(const json& j);
json presentation_to_json(const Presentation& p);
Presentation load_presentation(const std::string& path);

json growth_series_to_json(const GrowthSeries& s);
std::string growth_series_to_csv(const GrowthSeries& s);
GrowthSeries growth_series_from_csv(const std::string& text, std::string source);

json control_to_json(const ControlFunction& f);

/// Structural check of a CLI report against the published envelope schema
/// (docs/report.schema.json). Throws InvalidInput on any violation.
/// `expect_result` is false for CSV reports, whose config line stands alone.
void validate_report(const json& report, bool expect_result = true);

}  // namespace coarsekit

#endif
