#include "coarsekit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace coarsekit {

namespace {

Rational rational_from_json(const json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return Rational(v.get<double>());
    throw InvalidInput("expected a number or a 'p/q' string");
}

bool json_is_exactable(const json& v) { return v.is_string() || v.is_number_integer(); }

std::string format_double(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::ostringstream s;
        s << static_cast<long long>(v);
        return s.str();
    }
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

FiniteMetricSpace space_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("space file must be a JSON object");
    const std::string label = j.value("label", "space");
    std::vector<std::string> points;
    for (const auto& p : j.at("points"))
        points.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    const std::size_t n = points.size();
    const json& metric = j.at("metric");
    const std::string kind = metric.at("kind").get<std::string>();

    if (kind == "table") {
        const json& rows = metric.at("rows");
        if (rows.size() != n) throw InvalidInput("table must have one row per point");
        bool exactable = true;
        for (const auto& row : rows)
            for (const auto& v : row) exactable = exactable && json_is_exactable(v);
        std::vector<double> table(n * n);
        std::optional<std::vector<Rational>> exact;
        if (exactable) exact.emplace(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            const json& row = rows[i];
            if (row.size() != n) throw InvalidInput("ragged distance table");
            for (std::size_t k = 0; k < n; ++k) {
                const Rational q = rational_from_json(row[k]);
                table[i * n + k] = to_double(q);
                if (exact) (*exact)[i * n + k] = q;
            }
        }
        return FiniteMetricSpace(label, std::move(points), std::move(table), std::move(exact));
    }
    if (kind == "graph") {
        std::vector<std::tuple<int, int, Rational>> edges;
        for (const auto& e : metric.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw InvalidInput("edge must be [i, j, w]");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>(), rational_from_json(e[2]));
        }
        return FiniteMetricSpace::from_graph(label, n, edges, std::move(points));
    }
    if (kind == "line") {
        const json& coords = metric.at("coords");
        if (coords.size() != n) throw InvalidInput("one coordinate per point required");
        bool exactable = true;
        for (const auto& v : coords) exactable = exactable && json_is_exactable(v);
        if (exactable) {
            std::vector<Rational> xs;
            for (const auto& v : coords) xs.push_back(rational_from_json(v));
            const std::size_t count = xs.size();
            std::vector<double> table(count * count);
            std::vector<Rational> exact(count * count);
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t k = 0; k < count; ++k) {
                    Rational d = xs[i] - xs[k];
                    if (d < 0) d = -d;
                    exact[i * count + k] = d;
                    table[i * count + k] = to_double(d);
                }
            return FiniteMetricSpace(label, std::move(points), std::move(table),
                                     std::move(exact));
        }
        std::vector<double> xs;
        for (const auto& v : coords) xs.push_back(v.get<double>());
        std::vector<double> table(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) table[i * n + k] = std::abs(xs[i] - xs[k]);
        return FiniteMetricSpace(label, std::move(points), std::move(table));
    }
    throw InvalidInput("unknown metric kind '" + kind + "'");
}

json space_to_json(const FiniteMetricSpace& space) {
    json j;
    j["label"] = space.label();
    j["points"] = space.points();
    json rows = json::array();
    const std::size_t n = space.size();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < n; ++k) {
            if (space.has_exact())
                row.push_back(to_string(space.exact_dist(i, k)));
            else
                row.push_back(space.dist(i, k));
        }
        rows.push_back(std::move(row));
    }
    j["metric"] = json{{"kind", "table"}, {"rows", std::move(rows)}};
    return j;
}

FiniteMetricSpace load_space(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot read space file " + path);
    json j = json::parse(f, nullptr, true, true);
    return space_from_json(j);
}

void save_space(const FiniteMetricSpace& space, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write space file " + path);
    f << space_to_json(space).dump(2) << "\n";
}

MapSample map_from_json(const json& j) {
    MapSample f;
    f.domain = std::make_shared<FiniteMetricSpace>(space_from_json(j.at("domain")));
    f.codomain = std::make_shared<FiniteMetricSpace>(space_from_json(j.at("codomain")));
    f.image.resize(f.domain->size());
    const json& image = j.at("image");
    for (std::size_t i = 0; i < f.domain->size(); ++i) {
        const std::string& id = f.domain->point(i);
        if (!image.contains(id)) throw InvalidInput("image missing point '" + id + "'");
        const std::string target = image.at(id).is_string() ? image.at(id).get<std::string>()
                                                            : image.at(id).dump();
        const int ti = f.codomain->index_of(target);
        if (ti < 0) throw InvalidInput("image point '" + target + "' not in codomain");
        f.image[i] = ti;
    }
    f.validate();
    return f;
}

json complex_to_json(const Rips2Complex& cx) {
    json j;
    j["c"] = cx.scale;
    j["vertices"] = cx.space->points();
    json edges = json::array();
    for (const auto& [a, b] : cx.edges) edges.push_back(json::array({a, b}));
    j["edges"] = std::move(edges);
    json tris = json::array();
    for (const auto& t : cx.triangles) tris.push_back(json::array({t[0], t[1], t[2]}));
    j["triangles"] = std::move(tris);
    return j;
}

Presentation presentation_from_json(const json& j) {
    Presentation p;
    for (const auto& l : j.at("letters")) p.letters.push_back(l.get<std::string>());
    for (const auto& r : j.at("relators")) {
        Word w;
        for (const auto& part : r) {
            if (!part.is_array() || part.size() != 2)
                throw InvalidInput("relator entries are [letter, exponent]");
            const int li = p.letter_index(part[0].get<std::string>());
            if (li < 0) throw InvalidInput("relator uses unknown letter");
            const int e = part[1].get<int>();
            for (int k = 0; k < std::abs(e); ++k) w.push_back(e > 0 ? li + 1 : -(li + 1));
        }
        p.relators.push_back(free_reduce(w));
    }
    p.convention = j.value("convention", p.convention);
    if (j.contains("evaluation")) {
        const json& ev = j.at("evaluation");
        p.oracle = make_oracle(ev.at("family").get<std::string>());
        for (const auto& l : p.letters) {
            const json& images = ev.at("images");
            if (!images.contains(l)) throw InvalidInput("evaluation missing letter " + l);
            p.letter_images.push_back(p.oracle->evaluate_word(images.at(l).get<std::string>()));
        }
    }
    p.validate();
    return p;
}

json presentation_to_json(const Presentation& p) {
    json j;
    j["letters"] = p.letters;
    json relators = json::array();
    for (const auto& r : p.relators) {
        json rel = json::array();
        // Collapse runs of one signed letter into [letter, exponent] pairs.
        std::size_t i = 0;
        while (i < r.size()) {
            std::size_t k = i;
            while (k < r.size() && r[k] == r[i]) ++k;
            const int letter = std::abs(r[i]) - 1;
            const int exp = static_cast<int>(k - i) * (r[i] > 0 ? 1 : -1);
            rel.push_back(json::array({p.letters[letter], exp}));
            i = k;
        }
        relators.push_back(std::move(rel));
    }
    j["relators"] = std::move(relators);
    j["convention"] = p.convention;
    if (p.has_evaluation()) j["evaluation_family"] = p.oracle->family();
    return j;
}

Presentation load_presentation(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot read presentation file " + path);
    json j = json::parse(f, nullptr, true, true);
    return presentation_from_json(j);
}

json growth_series_to_json(const GrowthSeries& s) {
    json j;
    j["source"] = s.source;
    json samples = json::array();
    for (const auto& [r, count] : s.samples) samples.push_back(json::array({r, count}));
    j["samples"] = std::move(samples);
    return j;
}

std::string growth_series_to_csv(const GrowthSeries& s) {
    std::ostringstream out;
    out << "r,count\n";
    for (const auto& [r, count] : s.samples) out << format_double(r) << "," << count << "\n";
    return out.str();
}

GrowthSeries growth_series_from_csv(const std::string& text, std::string source) {
    GrowthSeries s;
    s.source = std::move(source);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "r,count") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidInput("bad CSV line: " + line);
        s.samples.emplace_back(std::stod(line.substr(0, comma)),
                               std::stoull(line.substr(comma + 1)));
    }
    s.validate();
    return s;
}

void validate_report(const json& report, bool expect_result) {
    if (!report.is_object()) throw InvalidInput("report must be an object");
    for (const auto& [key, value] : report.items()) {
        (void)value;
        if (key != "config" && key != "result")
            throw InvalidInput("unexpected report member '" + key + "'");
    }
    if (!report.contains("config")) throw InvalidInput("report missing config");
    const json& cfg = report.at("config");
    if (!cfg.is_object()) throw InvalidInput("config must be an object");
    const std::vector<std::pair<const char*, const char*>> fields = {
        {"subcommand", "string"}, {"budget", "unsigned"}, {"seed", "unsigned"},
        {"tolerance", "number"},  {"format", "string"},   {"jobs", "integer"},
        {"inputs", "object"},
    };
    for (const auto& [name, kind] : fields) {
        if (!cfg.contains(name)) throw InvalidInput(std::string("config missing ") + name);
        const json& v = cfg.at(name);
        const std::string k = kind;
        const bool ok = (k == "string" && v.is_string()) ||
                        (k == "unsigned" && v.is_number_unsigned()) ||
                        (k == "integer" && v.is_number_integer()) ||
                        (k == "number" && v.is_number()) || (k == "object" && v.is_object());
        if (!ok) throw InvalidInput(std::string("config field has wrong type: ") + name);
    }
    for (const auto& [key, value] : cfg.items()) {
        (void)value;
        bool known = false;
        for (const auto& [name, kind] : fields) {
            (void)kind;
            if (key == name) known = true;
        }
        if (!known) throw InvalidInput("unexpected config member '" + key + "'");
    }
    const std::string format = cfg.at("format").get<std::string>();
    if (format != "json" && format != "csv") throw InvalidInput("bad format value");
    if (expect_result) {
        if (!report.contains("result")) throw InvalidInput("report missing result");
        if (!report.at("result").is_object() && !report.at("result").is_array())
            throw InvalidInput("result must be an object or array");
    } else if (report.contains("result")) {
        throw InvalidInput("CSV config line must not carry a result");
    }
}

json control_to_json(const ControlFunction& f) {
    json j;
    j["kind"] = f.kind == ControlFunction::Kind::Upper ? "upper" : "lower";
    json bps = json::array();
    for (const auto& [t, v] : f.breakpoints) {
        if (std::isinf(v))
            bps.push_back(json::array({t, "inf"}));
        else
            bps.push_back(json::array({t, v}));
    }
    j["breakpoints"] = std::move(bps);
    j["tail"] = f.tail_infinite ? json("inf") : json(f.tail_slope);
    return j;
}

}  // namespace coarsekit
