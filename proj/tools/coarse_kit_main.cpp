// coarse-kit: command-line entry point for the coarse-geometry toolkit.
//
// Exit codes: 0 completed run (verdicts, including negative ones, live in the
// report), 2 usage or input-format error, 3 budget exhausted without a
// verdict.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "coarsekit/group_oracles.hpp"
#include "coarsekit/growth.hpp"
#include "coarsekit/json_io.hpp"
#include "coarsekit/metric_core.hpp"
#include "coarsekit/parallel.hpp"
#include "coarsekit/rips.hpp"
#include "coarsekit/splitting.hpp"

using namespace coarsekit;

namespace {

struct RunConfig {
    std::string subcommand;
    std::uint64_t budget = 1'000'000;
    std::uint64_t seed = 0;
    std::string format = "json";
    int jobs = 1;
    json inputs = json::object();
};

json config_json(const RunConfig& cfg) {
    json j;
    j["subcommand"] = cfg.subcommand;
    j["budget"] = cfg.budget;
    j["seed"] = cfg.seed;
    j["tolerance"] = kTol;
    j["format"] = cfg.format;
    j["jobs"] = cfg.jobs;
    j["inputs"] = cfg.inputs;
    return j;
}

void emit_json(const RunConfig& cfg, json result) {
    json report;
    report["config"] = config_json(cfg);
    report["result"] = std::move(result);
    std::cout << report.dump(2) << "\n";
}

void emit_csv(const RunConfig& cfg, const std::string& body) {
    std::cout << "# config " << json{{"config", config_json(cfg)}}.dump() << "\n" << body;
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<int> parse_point_list(const FiniteMetricSpace& space, const std::string& text) {
    // Semicolons take precedence so that point ids containing commas (word
    // ball keys) stay expressible.
    const char sep = text.find(';') != std::string::npos ? ';' : ',';
    std::vector<int> out;
    for (const auto& id : split_list(text, sep)) {
        const int idx = space.index_of(id);
        if (idx < 0) throw InvalidInput("unknown point id '" + id + "'");
        out.push_back(idx);
    }
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    for (const auto& item : split_list(text)) out.push_back(parse_rational(item));
    return out;
}

json witness_json(const GrowthComparison& cmp, const GrowthSeries& a, const GrowthSeries& b) {
    json j;
    if (!cmp.found()) {
        j["verdict"] = "no_witness_in_grid";
        return j;
    }
    j["verdict"] = "preceq_witness";
    j["lambda"] = to_string(cmp.witness->lambda);
    j["mu"] = to_string(cmp.witness->mu);
    j["c"] = to_string(cmp.witness->c);
    j["range"] = json::array({cmp.witness->r_lo, cmp.witness->r_hi});
    j["recheck_hash"] = witness_recheck_hash(a, b, *cmp.witness);
    return j;
}

json h1_json(const H1Class& cls) {
    json j;
    j["zero"] = cls.zero;
    json coords = json::array();
    for (auto [idx, val] : cls.coords) coords.push_back(json::array({idx, val}));
    j["coords"] = std::move(coords);
    return j;
}

const char* status_name(ContractionStatus s) {
    switch (s) {
        case ContractionStatus::Contracted: return "contracted";
        case ContractionStatus::NontrivialH1: return "nontrivial_h1";
        case ContractionStatus::Unknown: return "unknown";
    }
    return "?";
}

json loop_json(const Loop& loop, const FiniteMetricSpace& space) {
    json j = json::array();
    for (int v : loop) j.push_back(space.point(v));
    return j;
}

GrowthSeries load_series_arg(const std::string& family, int radius, const std::string& csv_path,
                             Budget& budget) {
    if (!family.empty()) {
        auto ball = word_ball(make_oracle(family), radius, budget);
        return growth_series(ball, radius);
    }
    std::ifstream f(csv_path);
    if (!f) throw InvalidInput("cannot read series file " + csv_path);
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = buf.str();
    // Tolerate a leading "# config" comment line.
    while (!text.empty() && text[0] == '#') {
        const auto nl = text.find('\n');
        text = nl == std::string::npos ? std::string() : text.substr(nl + 1);
    }
    return growth_series_from_csv(text, csv_path);
}

CircleLoop make_circle_loop(double R, int m, const std::string& spec) {
    CircleLoop loop;
    loop.radius = R;
    if (spec == "polygon") {
        for (int j = 0; j < m; ++j) loop.turns.push_back(Rational(j, m));
    } else if (spec == "constant") {
        for (int j = 0; j < m; ++j) loop.turns.push_back(Rational(0));
    } else {
        for (const auto& item : split_list(spec)) {
            const long long j = std::stoll(item);
            loop.turns.push_back(Rational(j, m));
        }
        if (loop.turns.empty()) throw InvalidInput("empty loop spec");
    }
    return loop;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coarse-kit: word metrics, Rips complexes, growth, and splitting classifiers"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("COARSEKIT_BUDGET")) cfg.budget = std::strtoull(env, nullptr, 10);

    // Shared flags, registered on every subcommand.
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--budget", cfg.budget, "node/move/subset budget");
        sub->add_option("--seed", cfg.seed, "seed for all randomized sampling");
        sub->add_option("--format", cfg.format, "output format: json or csv");
        sub->add_option("--jobs", cfg.jobs, "worker threads for internal scans");
    };

    // --- ball ---------------------------------------------------------------
    auto* ball_cmd = app.add_subcommand("ball", "enumerate a word ball");
    std::string family, cache_path;
    int radius = 2;
    ball_cmd->add_option("--family", family, "oracle family, e.g. free:2")->required();
    ball_cmd->add_option("--radius", radius, "ball radius")->required();
    ball_cmd->add_option("--cache", cache_path, "ball cache file to load/save");
    add_common(ball_cmd);

    // --- growth ---------------------------------------------------------------
    auto* growth_cmd = app.add_subcommand("growth", "ball-size growth series");
    std::string g_family, g_space_path, g_base;
    int g_radius = 8;
    double g_rmax = -1;
    growth_cmd->add_option("--family", g_family, "oracle family");
    growth_cmd->add_option("--radius", g_radius, "maximum radius");
    growth_cmd->add_option("--space", g_space_path, "space file");
    growth_cmd->add_option("--base", g_base, "base point id (space input)");
    growth_cmd->add_option("--rmax", g_rmax, "maximum radius for space input");
    add_common(growth_cmd);

    // --- compare-growth ----------------------------------------------------------
    auto* cmp_cmd = app.add_subcommand("compare-growth", "search for a growth-preorder witness");
    std::string ca_family, cb_family, ca_file, cb_file, grid_lambdas, grid_mus, grid_cs;
    int ca_radius = 8, cb_radius = 8;
    cmp_cmd->add_option("--family-a", ca_family, "first oracle family");
    cmp_cmd->add_option("--family-b", cb_family, "second oracle family");
    cmp_cmd->add_option("--radius-a", ca_radius, "first radius");
    cmp_cmd->add_option("--radius-b", cb_radius, "second radius");
    cmp_cmd->add_option("--series-a", ca_file, "first series CSV");
    cmp_cmd->add_option("--series-b", cb_file, "second series CSV");
    cmp_cmd->add_option("--lambdas", grid_lambdas, "grid, comma-separated rationals");
    cmp_cmd->add_option("--mus", grid_mus, "grid, comma-separated rationals");
    cmp_cmd->add_option("--cs", grid_cs, "grid, comma-separated rationals");
    add_common(cmp_cmd);

    // --- poldeg ---------------------------------------------------------------
    auto* poldeg_cmd = app.add_subcommand("poldeg", "polynomial-degree estimate");
    std::string p_family, p_file;
    int p_radius = 16;
    double p_tail = 0.5;
    poldeg_cmd->add_option("--family", p_family, "oracle family");
    poldeg_cmd->add_option("--radius", p_radius, "maximum radius");
    poldeg_cmd->add_option("--series", p_file, "series CSV file");
    poldeg_cmd->add_option("--tail", p_tail, "trailing fraction used in the fit");
    add_common(poldeg_cmd);

    // --- distortion ---------------------------------------------------------------
    auto* dist_cmd = app.add_subcommand("distortion", "word lengths of powers");
    std::string d_family, d_element;
    int d_nmax = 16, d_max_radius = 32;
    dist_cmd->add_option("--family", d_family, "oracle family")->required();
    dist_cmd->add_option("--element", d_element, "word over generators, e.g. 'u'")->required();
    dist_cmd->add_option("--nmax", d_nmax, "largest power");
    dist_cmd->add_option("--max-radius", d_max_radius, "search radius limit");
    add_common(dist_cmd);

    // --- lattice ---------------------------------------------------------------
    auto* lat_cmd = app.add_subcommand("lattice", "greedy metric lattice");
    std::string l_space, l_seed_point;
    double l_c = 1.0;
    lat_cmd->add_option("--space", l_space, "space file")->required();
    lat_cmd->add_option("--c", l_c, "separation constant")->required();
    lat_cmd->add_option("--seed-point", l_seed_point, "starting point id")->required();
    add_common(lat_cmd);

    // --- folner ---------------------------------------------------------------
    auto* fol_cmd = app.add_subcommand("folner", "Folner witness search");
    std::string f_family, f_eps = "1/2", f_strategy = "balls";
    int f_r = 1, f_max_size = 0;
    fol_cmd->add_option("--family", f_family, "oracle family")->required();
    fol_cmd->add_option("--r", f_r, "neighborhood radius");
    fol_cmd->add_option("--epsilon", f_eps, "tolerance, rational");
    fol_cmd->add_option("--strategy", f_strategy, "balls | greedy | exhaustive");
    fol_cmd->add_option("--max-size", f_max_size, "size bound for exhaustive search");
    add_common(fol_cmd);

    // --- tree-check ---------------------------------------------------------------
    auto* tree_cmd = app.add_subcommand("tree-check", "tree boundary inequality");
    int t_degree = 3, t_depth = 12, t_exhaustive = 0;
    std::string t_set;
    tree_cmd->add_option("--degree", t_degree, "tree degree");
    tree_cmd->add_option("--depth", t_depth, "truncation depth");
    tree_cmd->add_option("--u", t_set, "vertex ids, comma-separated integers");
    tree_cmd->add_option("--exhaustive-size", t_exhaustive, "check all subsets up to this size");
    add_common(tree_cmd);

    // --- ultrametrize ---------------------------------------------------------------
    auto* ultra_cmd = app.add_subcommand("ultrametrize", "minimax chain metric");
    std::string u_space, u_out;
    ultra_cmd->add_option("--space", u_space, "space file")->required();
    ultra_cmd->add_option("--out", u_out, "write the result space here");
    add_common(ultra_cmd);

    // --- components ---------------------------------------------------------------
    auto* comp_cmd = app.add_subcommand("components", "c-path components");
    std::string c_space;
    double c_scale = 1.0;
    comp_cmd->add_option("--space", c_space, "space file")->required();
    comp_cmd->add_option("--c", c_scale, "scale")->required();
    add_common(comp_cmd);

    // --- controls ---------------------------------------------------------------
    auto* ctl_cmd = app.add_subcommand("controls", "empirical controls of a sampled map");
    std::string ctl_map;
    ctl_cmd->add_option("--map", ctl_map, "map file")->required();
    add_common(ctl_cmd);

    // --- rips ---------------------------------------------------------------
    auto* rips_cmd = app.add_subcommand("rips", "Rips 2-complex dump");
    std::string r_space;
    double r_scale = 1.0;
    rips_cmd->add_option("--space", r_space, "space file")->required();
    rips_cmd->add_option("--c", r_scale, "scale")->required();
    add_common(rips_cmd);

    // --- h1 ---------------------------------------------------------------
    auto* h1_cmd = app.add_subcommand("h1", "abelianized loop class");
    std::string h_space, h_loop;
    double h_scale = 1.0;
    h1_cmd->add_option("--space", h_space, "space file")->required();
    h1_cmd->add_option("--c", h_scale, "scale")->required();
    h1_cmd->add_option("--loop", h_loop, "loop as comma-separated point ids")->required();
    add_common(h1_cmd);

    // --- contract ---------------------------------------------------------------
    auto* con_cmd = app.add_subcommand("contract", "bounded loop-contraction search");
    std::string con_space, con_loop;
    double con_scale = 1.0;
    int con_slack = 2;
    con_cmd->add_option("--space", con_space, "space file")->required();
    con_cmd->add_option("--c", con_scale, "scale")->required();
    con_cmd->add_option("--loop", con_loop, "loop as comma-separated point ids")->required();
    con_cmd->add_option("--slack", con_slack, "allowed growth over the initial length");
    add_common(con_cmd);

    // --- sc-probe ---------------------------------------------------------------
    auto* sc_cmd = app.add_subcommand("sc-probe", "sampled simple-connectedness probe");
    std::string sc_space, sc_x0;
    double sc_cp = 1.0, sc_cs = 1.0;
    int sc_samples = 32;
    std::uint64_t sc_move_budget = 0;  // per-phase override; 0 means --budget
    sc_cmd->add_option("--space", sc_space, "space file")->required();
    sc_cmd->add_option("--x0", sc_x0, "base point id")->required();
    sc_cmd->add_option("--cprime", sc_cp, "sampling scale")->required();
    sc_cmd->add_option("--csecond", sc_cs, "contraction scale")->required();
    sc_cmd->add_option("--samples", sc_samples, "number of sampled loops");
    sc_cmd->add_option("--move-budget", sc_move_budget,
                       "contraction-phase budget override (default: --budget)");
    add_common(sc_cmd);

    // --- rotation ---------------------------------------------------------------
    auto* rot_cmd = app.add_subcommand("rotation", "circle rotation number");
    std::string rot_circle = "1:12", rot_loop = "polygon";
    rot_cmd->add_option("--circle", rot_circle, "R:m circle spec");
    rot_cmd->add_option("--loop", rot_loop, "polygon | constant | index list");
    add_common(rot_cmd);

    // --- fixture ---------------------------------------------------------------
    auto* fix_cmd = app.add_subcommand("fixture", "generate a named space");
    std::string fix_name, fix_params, fix_out;
    fix_cmd->add_option("--name", fix_name, "circle | highway")->required();
    fix_cmd->add_option("--params", fix_params, "circle: R:m, highway: n")->required();
    fix_cmd->add_option("--out", fix_out, "write the space here");
    add_common(fix_cmd);

    // --- defining-subset ---------------------------------------------------------------
    auto* def_cmd = app.add_subcommand("defining-subset", "ball rewriting of a presentation");
    std::string def_pres, def_out;
    def_cmd->add_option("--presentation", def_pres, "presentation file")->required();
    def_cmd->add_option("--out", def_out, "write the result presentation here");
    add_common(def_cmd);

    // --- verify-presentation ---------------------------------------------------------------
    auto* ver_cmd = app.add_subcommand("verify-presentation", "evaluate all relators");
    std::string ver_pres;
    ver_cmd->add_option("--presentation", ver_pres, "presentation file")->required();
    add_common(ver_cmd);

    // --- engulfs ---------------------------------------------------------------
    auto* eng_cmd = app.add_subcommand("engulfs", "multiplication-engulfing test");
    std::string eng_lambda, eng_primes;
    eng_cmd->add_option("--lambda", eng_lambda, "rational multiplier")->required();
    eng_cmd->add_option("--primes", eng_primes, "comma-separated primes")->required();
    add_common(eng_cmd);

    // --- classify-bs ---------------------------------------------------------------
    auto* bs_cmd = app.add_subcommand("classify-bs", "finiteness class of Z[1/p1..pn] x| Z");
    std::string bs_lambda, bs_primes;
    bs_cmd->add_option("--lambda", bs_lambda, "rational multiplier")->required();
    bs_cmd->add_option("--primes", bs_primes, "comma-separated primes")->required();
    add_common(bs_cmd);

    // --- classify-semidirect ---------------------------------------------------------------
    auto* semi_cmd = app.add_subcommand("classify-semidirect", "compact presentability class");
    std::string semi_hom;
    semi_cmd->add_option("--hom", semi_hom, "factors as base:q1,q2;base:q1,q2")->required();
    add_common(semi_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_worker_count(cfg.jobs);
        Budget budget(cfg.budget);

        if (*ball_cmd) {
            cfg.subcommand = "ball";
            cfg.inputs = {{"family", family}, {"radius", radius}, {"cache", cache_path}};
            std::optional<BallTable> table;
            if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
                table = load_ball_cache(cache_path);
                if (table->oracle().family() != family)
                    throw InvalidInput("cache family does not match --family");
                table->extend_to(radius, budget);
            } else {
                table = word_ball(make_oracle(family), radius, budget);
            }
            if (!cache_path.empty()) save_ball_cache(*table, cache_path);
            json sizes = json::array();
            for (int r = 0; r <= radius; ++r) sizes.push_back(table->ball_size(r));
            emit_json(cfg, json{{"ball_sizes", sizes},
                                {"elements", table->size()},
                                {"closed", table->closed()}});
            return 0;
        }

        if (*growth_cmd) {
            cfg.subcommand = "growth";
            cfg.inputs = {{"family", g_family}, {"radius", g_radius},
                          {"space", g_space_path}, {"base", g_base}};
            cfg.format = growth_cmd->count("--format") ? cfg.format : "csv";
            GrowthSeries series;
            if (!g_family.empty()) {
                auto ball = word_ball(make_oracle(g_family), g_radius, budget);
                series = growth_series(ball, g_radius);
            } else if (!g_space_path.empty()) {
                const auto space = load_space(g_space_path);
                const int base = space.index_of(g_base);
                if (base < 0) throw InvalidInput("unknown base point");
                series = growth_series(space, base, g_rmax < 0 ? space.diameter() : g_rmax);
            } else {
                throw InvalidInput("growth needs --family or --space");
            }
            if (cfg.format == "csv")
                emit_csv(cfg, growth_series_to_csv(series));
            else
                emit_json(cfg, growth_series_to_json(series));
            return 0;
        }

        if (*cmp_cmd) {
            cfg.subcommand = "compare-growth";
            cfg.inputs = {{"family_a", ca_family}, {"family_b", cb_family},
                          {"series_a", ca_file},   {"series_b", cb_file},
                          {"radius_a", ca_radius}, {"radius_b", cb_radius}};
            const auto a = load_series_arg(ca_family, ca_radius, ca_file, budget);
            const auto b = load_series_arg(cb_family, cb_radius, cb_file, budget);
            ComparisonGrid grid;
            if (!grid_lambdas.empty()) grid.lambdas = parse_rational_list(grid_lambdas);
            if (!grid_mus.empty()) grid.mus = parse_rational_list(grid_mus);
            if (!grid_cs.empty()) grid.cs = parse_rational_list(grid_cs);
            json grid_json = {{"lambdas", json::array()}, {"mus", json::array()},
                              {"cs", json::array()}};
            for (const auto& v : grid.lambdas) grid_json["lambdas"].push_back(to_string(v));
            for (const auto& v : grid.mus) grid_json["mus"].push_back(to_string(v));
            for (const auto& v : grid.cs) grid_json["cs"].push_back(to_string(v));
            json result = witness_json(compare_growth(a, b, grid), a, b);
            result["grid"] = std::move(grid_json);
            emit_json(cfg, std::move(result));
            return 0;
        }

        if (*poldeg_cmd) {
            cfg.subcommand = "poldeg";
            cfg.inputs = {{"family", p_family}, {"radius", p_radius}, {"series", p_file},
                          {"tail", p_tail}};
            const auto series = load_series_arg(p_family, p_radius, p_file, budget);
            const auto est = poldeg_estimate(series, p_tail);
            emit_json(cfg, json{{"exponent", est.exponent},
                                {"residual", est.residual},
                                {"points_used", est.points_used}});
            return 0;
        }

        if (*dist_cmd) {
            cfg.subcommand = "distortion";
            cfg.inputs = {{"family", d_family}, {"element", d_element}, {"nmax", d_nmax},
                          {"max_radius", d_max_radius}};
            auto oracle = make_oracle(d_family);
            const Elem z = oracle->evaluate_word(d_element);
            const auto profile = distortion_profile(oracle, z, d_nmax, d_max_radius, budget);
            json rows = json::array();
            for (const auto& e : profile)
                rows.push_back(json::array(
                    {e.n, e.length ? json(*e.length) : json(nullptr)}));
            json result{{"profile", rows}};
            try {
                result["fitted_exponent"] = distortion_exponent(profile);
            } catch (const TooFewSamples&) {
                result["fitted_exponent"] = nullptr;
            }
            emit_json(cfg, std::move(result));
            return 0;
        }

        if (*lat_cmd) {
            cfg.subcommand = "lattice";
            cfg.inputs = {{"space", l_space}, {"c", l_c}, {"seed_point", l_seed_point}};
            const auto space = load_space(l_space);
            const int seed_idx = space.index_of(l_seed_point);
            if (seed_idx < 0) throw InvalidInput("unknown seed point");
            const auto lattice = greedy_lattice(space, l_c, seed_idx);
            json pts = json::array();
            double cobound = 0;
            for (std::size_t p = 0; p < space.size(); ++p) {
                double best = -1;
                for (int q : lattice) {
                    const double d = space.dist(p, q);
                    if (best < 0 || d < best) best = d;
                }
                cobound = std::max(cobound, best);
            }
            for (int v : lattice) pts.push_back(space.point(v));
            emit_json(cfg, json{{"lattice", pts},
                                {"separation", l_c},
                                {"coboundedness", cobound}});
            return 0;
        }

        if (*fol_cmd) {
            cfg.subcommand = "folner";
            cfg.inputs = {{"family", f_family}, {"r", f_r}, {"epsilon", f_eps},
                          {"strategy", f_strategy}, {"max_size", f_max_size}};
            FolnerStrategy strategy;
            if (f_strategy == "balls")
                strategy = FolnerStrategy::Balls;
            else if (f_strategy == "greedy")
                strategy = FolnerStrategy::Greedy;
            else if (f_strategy == "exhaustive")
                strategy = FolnerStrategy::Exhaustive;
            else
                throw InvalidInput("unknown strategy '" + f_strategy + "'");
            auto oracle = make_oracle(f_family);
            BallTable ball(oracle, oracle->generators());
            const auto res = folner_search(ball, f_r, parse_rational(f_eps), strategy, budget,
                                           f_max_size);
            if (res.found()) {
                emit_json(cfg, json{{"verdict", "witness"},
                                    {"members", res.witness->members},
                                    {"size", res.witness->members.size()},
                                    {"r", res.witness->r},
                                    {"ratio", to_string(res.witness->ratio)}});
            } else {
                emit_json(cfg, json{{"verdict", "no_witness_within_budget"}});
            }
            return 0;
        }

        if (*tree_cmd) {
            cfg.subcommand = "tree-check";
            cfg.inputs = {{"degree", t_degree}, {"depth", t_depth}, {"u", t_set},
                          {"exhaustive_size", t_exhaustive}};
            const auto tree = build_regular_tree(t_degree, t_depth);
            if (t_exhaustive > 0) {
                const auto report = exhaustive_tree_check(tree, t_exhaustive, budget);
                emit_json(cfg, json{{"subsets", report.subsets},
                                    {"all_hold", report.all_hold}});
            } else {
                std::vector<int> subset;
                for (const auto& part : split_list(t_set)) subset.push_back(std::stoi(part));
                const auto check = tree_boundary_check(tree, subset);
                emit_json(cfg, json{{"boundary", check.boundary_size},
                                    {"size", subset.size()},
                                    {"holds", check.holds}});
            }
            return 0;
        }

        if (*ultra_cmd) {
            cfg.subcommand = "ultrametrize";
            cfg.inputs = {{"space", u_space}, {"out", u_out}};
            const auto space = load_space(u_space);
            const auto result = ultrametrize(space);
            if (!u_out.empty()) save_space(result, u_out);
            emit_json(cfg, space_to_json(result));
            return 0;
        }

        if (*comp_cmd) {
            cfg.subcommand = "components";
            cfg.inputs = {{"space", c_space}, {"c", c_scale}};
            const auto space = load_space(c_space);
            json blocks = json::array();
            for (const auto& block : c_components(space, c_scale)) {
                json b = json::array();
                for (int v : block) b.push_back(space.point(v));
                blocks.push_back(std::move(b));
            }
            emit_json(cfg, json{{"components", blocks},
                                {"c_geodesic", is_c_geodesic(space, c_scale)}});
            return 0;
        }

        if (*ctl_cmd) {
            cfg.subcommand = "controls";
            cfg.inputs = {{"map", ctl_map}};
            std::ifstream f(ctl_map);
            if (!f) throw InvalidInput("cannot read map file " + ctl_map);
            const json j = json::parse(f, nullptr, true, true);
            const auto sample = map_from_json(j);
            const auto controls = empirical_controls(sample);
            emit_json(cfg, json{{"lower", control_to_json(controls.lower)},
                                {"upper", control_to_json(controls.upper)}});
            return 0;
        }

        if (*rips_cmd) {
            cfg.subcommand = "rips";
            cfg.inputs = {{"space", r_space}, {"c", r_scale}};
            auto space = std::make_shared<FiniteMetricSpace>(load_space(r_space));
            emit_json(cfg, complex_to_json(build_rips(space, r_scale)));
            return 0;
        }

        if (*h1_cmd) {
            cfg.subcommand = "h1";
            cfg.inputs = {{"space", h_space}, {"c", h_scale}, {"loop", h_loop}};
            auto space = std::make_shared<FiniteMetricSpace>(load_space(h_space));
            const auto cx = build_rips(space, h_scale);
            Pi1Data pi1(cx);
            const auto loop = parse_point_list(*space, h_loop);
            emit_json(cfg, h1_json(h1_class(cx, pi1, loop)));
            return 0;
        }

        if (*con_cmd) {
            cfg.subcommand = "contract";
            cfg.inputs = {{"space", con_space}, {"c", con_scale}, {"loop", con_loop},
                          {"slack", con_slack}};
            auto space = std::make_shared<FiniteMetricSpace>(load_space(con_space));
            const auto cx = build_rips(space, con_scale);
            const auto loop = parse_point_list(*space, con_loop);
            const auto verdict = contract_loop(cx, loop, cfg.budget, con_slack);
            json result{{"verdict", status_name(verdict.status)},
                        {"states_explored", verdict.states_explored}};
            if (verdict.status == ContractionStatus::Contracted) {
                json trace = json::array();
                for (const auto& l : verdict.trace) trace.push_back(loop_json(l, *space));
                result["trace"] = std::move(trace);
            } else if (verdict.status == ContractionStatus::NontrivialH1) {
                result["certificate"] = h1_json(verdict.certificate);
            }
            emit_json(cfg, std::move(result));
            return 0;
        }

        if (*sc_cmd) {
            cfg.subcommand = "sc-probe";
            cfg.inputs = {{"space", sc_space},   {"x0", sc_x0},
                          {"cprime", sc_cp},     {"csecond", sc_cs},
                          {"samples", sc_samples}, {"move_budget", sc_move_budget}};
            auto space = std::make_shared<FiniteMetricSpace>(load_space(sc_space));
            const int x0 = space->index_of(sc_x0);
            if (x0 < 0) throw InvalidInput("unknown base point");
            const auto report =
                sc_probe(space, x0, sc_cp, sc_cs, sc_samples,
                         sc_move_budget > 0 ? sc_move_budget : cfg.budget, cfg.seed);
            json loops = json::array();
            for (const auto& probe : report.loops)
                loops.push_back(json{{"loop", loop_json(probe.loop, *space)},
                                     {"verdict", status_name(probe.status)}});
            emit_json(cfg, json{{"loops", loops},
                                {"h1_map_zero", report.h1_map_zero},
                                {"sc_failure_certified", report.sc_failure_certified}});
            return 0;
        }

        if (*rot_cmd) {
            cfg.subcommand = "rotation";
            cfg.inputs = {{"circle", rot_circle}, {"loop", rot_loop}};
            const auto parts = split_list(rot_circle, ':');
            if (parts.size() != 2) throw InvalidInput("circle spec is R:m");
            const double R = to_double(parse_rational(parts[0]));
            const int m = std::stoi(parts[1]);
            if (m < 3) throw BadParams("need m >= 3");
            const auto cert = rotation_number(make_circle_loop(R, m, rot_loop));
            json counts = json::array();
            for (int a = 0; a < 3; ++a)
                counts.push_back(json::array(
                    {cert.counts[a][0], cert.counts[a][1], cert.counts[a][2]}));
            emit_json(cfg, json{{"rho", cert.rho}, {"counts", counts}, {"radius", cert.radius}});
            return 0;
        }

        if (*fix_cmd) {
            cfg.subcommand = "fixture";
            cfg.inputs = {{"name", fix_name}, {"params", fix_params}, {"out", fix_out}};
            std::optional<FiniteMetricSpace> space;
            if (fix_name == "circle") {
                const auto parts = split_list(fix_params, ':');
                if (parts.size() != 2) throw BadParams("circle params are R:m");
                space = circle_fixture(to_double(parse_rational(parts[0])),
                                       std::stoi(parts[1]));
            } else if (fix_name == "highway") {
                space = highway_fixture(std::stoi(fix_params));
            } else {
                throw BadParams("unknown fixture '" + fix_name + "'");
            }
            if (!fix_out.empty()) save_space(*space, fix_out);
            emit_json(cfg, space_to_json(*space));
            return 0;
        }

        if (*def_cmd) {
            cfg.subcommand = "defining-subset";
            cfg.inputs = {{"presentation", def_pres}, {"out", def_out}};
            const auto p = load_presentation(def_pres);
            const auto q = defining_subset_presentation(p, budget);
            json out = presentation_to_json(q);
            out["relator_count"] = q.relators.size();
            out["max_relator_length"] = q.max_relator_length();
            out["relators_hold"] = relators_hold(q).ok;
            if (!def_out.empty()) {
                std::ofstream f(def_out, std::ios::binary);
                f << presentation_to_json(q).dump(2) << "\n";
            }
            emit_json(cfg, std::move(out));
            return 0;
        }

        if (*ver_cmd) {
            cfg.subcommand = "verify-presentation";
            cfg.inputs = {{"presentation", ver_pres}};
            const auto p = load_presentation(ver_pres);
            const auto check = relators_hold(p);
            json result{{"holds", check.ok},
                        {"max_relator_length", p.max_relator_length()}};
            if (!check.ok) result["failing_relator"] = check.failing_relator;
            emit_json(cfg, std::move(result));
            return 0;
        }

        if (*eng_cmd || *bs_cmd) {
            const bool engulf_mode = static_cast<bool>(*eng_cmd);
            cfg.subcommand = engulf_mode ? "engulfs" : "classify-bs";
            const std::string lam = engulf_mode ? eng_lambda : bs_lambda;
            const std::string pr = engulf_mode ? eng_primes : bs_primes;
            cfg.inputs = {{"lambda", lam}, {"primes", pr}};
            std::vector<long long> primes;
            for (const auto& p : split_list(pr)) primes.push_back(std::stoll(p));
            const auto v = make_valuation(parse_rational(lam), primes);
            json echo{{"lambda", to_string(v.lambda)}, {"primes", v.primes},
                      {"valuations", v.vals}};
            if (engulf_mode) {
                emit_json(cfg, json{{"engulfs", engulfs(v)}, {"input", echo}});
            } else {
                emit_json(cfg, json{{"verdict", to_string(classify_gamma_lambda(v))},
                                    {"input", echo}});
            }
            return 0;
        }

        if (*semi_cmd) {
            cfg.subcommand = "classify-semidirect";
            cfg.inputs = {{"hom", semi_hom}};
            std::vector<HomFactor> factors;
            for (const auto& part : split_list(semi_hom, ';')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos)
                    throw InvalidInput("factor spec is base:q1,q2,...");
                HomFactor w;
                w.base = std::stoll(part.substr(0, colon));
                w.direction = parse_rational_list(part.substr(colon + 1));
                factors.push_back(std::move(w));
            }
            json echo = json::array();
            for (const auto& w : factors) {
                json dir = json::array();
                for (const auto& q : w.direction) dir.push_back(to_string(q));
                echo.push_back(json{{"base", w.base}, {"direction", dir}});
            }
            emit_json(cfg, json{{"verdict", to_string(classify_semidirect(factors))},
                                {"input", echo}});
            return 0;
        }

        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
