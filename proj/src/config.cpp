#include "polybill/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace polybill {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

// Integers written as 1e5 arrive as floating point.
void read_count(const json& j, const char* key, long& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (it->is_number_integer()) {
        out = it->get<long>();
    } else if (it->is_number_float()) {
        double v = it->get<double>();
        if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError(std::string("'") + key + "' must be an integer");
        out = static_cast<long>(v);
    } else {
        throw ConfigError(std::string("'") + key + "' must be a number");
    }
}

void read_count(const json& j, const char* key, int& out) {
    long v = out;
    read_count(j, key, v);
    out = static_cast<int>(v);
}

json polygon_json(const PolygonSpec& p) {
    if (p.kind == "regular") return {{"regular", p.sides}};
    if (p.kind == "rectangle") return {{"rectangle", p.h}};
    return {{"vertices", p.vertices}};
}

PolygonSpec polygon_from(const json& j) {
    reject_unknown(j, {"regular", "rectangle", "vertices"}, "polygon");
    if (j.size() != 1) throw ConfigError("polygon needs exactly one of regular, rectangle, vertices");
    PolygonSpec p;
    if (j.contains("regular")) {
        p.kind = "regular";
        long d = 0;
        read_count(j, "regular", d);
        p.sides = static_cast<int>(d);
    } else if (j.contains("rectangle")) {
        p.kind = "rectangle";
        read(j, "rectangle", p.h);
    } else {
        p.kind = "vertices";
        read(j, "vertices", p.vertices);
    }
    return p;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json j;
    j["command"] = c.command;
    j["polygon"] = polygon_json(c.polygon);
    j["law"] = {{"type", c.law.type}, {"sigma", c.law.sigma}};
    j["n"] = c.n;
    j["seeds"] = c.seeds;
    j["n_orbits"] = c.n_orbits;
    j["n_transient"] = c.n_transient;
    j["n_keep"] = c.n_keep;
    j["grid"] = {c.grid_s, c.grid_theta};
    j["eps_list"] = c.eps_list;
    j["m"] = c.m;
    j["resolution"] = c.resolution;
    j["samples"] = c.samples;
    j["theorem"] = c.theorem;
    j["gamma"] = {{"edge", c.gamma.edge}, {"from", c.gamma.from}, {"to", c.gamma.to}, {"thetas", c.gamma.thetas}, {"levels", c.gamma.levels}};
    j["sigma_list"] = c.sigma_list;
    j["h_list"] = c.h_list;
    j["rng_seed"] = c.rng_seed;
    j["output"] = c.output;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    reject_unknown(j,
                   {"command", "polygon", "law", "n", "seeds", "n_orbits", "n_transient", "n_keep", "grid", "eps_list", "m",
                    "resolution", "samples", "theorem", "gamma", "sigma_list", "h_list", "rng_seed", "output"},
                   "config");
    ExperimentConfig c;
    read(j, "command", c.command);
    if (j.contains("polygon")) c.polygon = polygon_from(j["polygon"]);
    if (j.contains("law")) {
        const json& l = j["law"];
        reject_unknown(l, {"type", "sigma"}, "law");
        read(l, "type", c.law.type);
        read(l, "sigma", c.law.sigma);
    }
    read_count(j, "n", c.n);
    read_count(j, "seeds", c.seeds);
    read_count(j, "n_orbits", c.n_orbits);
    read_count(j, "n_transient", c.n_transient);
    read_count(j, "n_keep", c.n_keep);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.is_number_integer()) {
            c.grid_s = c.grid_theta = g.get<int>();
        } else if (g.is_array() && g.size() == 2 && g[0].is_number_integer() && g[1].is_number_integer()) {
            c.grid_s = g[0].get<int>();
            c.grid_theta = g[1].get<int>();
        } else {
            throw ConfigError("grid must be an integer or a pair of integers");
        }
    }
    read(j, "eps_list", c.eps_list);
    read_count(j, "m", c.m);
    read_count(j, "resolution", c.resolution);
    read_count(j, "samples", c.samples);
    read(j, "theorem", c.theorem);
    if (j.contains("gamma")) {
        const json& g = j["gamma"];
        reject_unknown(g, {"edge", "from", "to", "thetas", "levels"}, "gamma");
        read_count(g, "edge", c.gamma.edge);
        read(g, "from", c.gamma.from);
        read(g, "to", c.gamma.to);
        read(g, "thetas", c.gamma.thetas);
        read_count(g, "levels", c.gamma.levels);
    }
    read(j, "sigma_list", c.sigma_list);
    read(j, "h_list", c.h_list);
    read(j, "rng_seed", c.rng_seed);
    read(j, "output", c.output);

    if (c.n < 0 || c.seeds < 0 || c.n_orbits < 0 || c.n_transient < 0 || c.n_keep < 0) throw ConfigError("counts must be nonnegative");
    if (c.grid_s <= 0 || c.grid_theta <= 0) throw ConfigError("grid sizes must be positive");
    if (c.m < 0 || c.resolution <= 0 || c.samples <= 0) throw ConfigError("m, resolution and samples out of range");
    for (double e : c.eps_list)
        if (!(e > 0.0)) throw ConfigError("eps_list entries must be positive");
    return c;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Polygon make_polygon(const PolygonSpec& spec) {
    try {
        if (spec.kind == "regular") {
            if (spec.sides < 3) throw ConfigError("a regular polygon needs at least 3 sides");
            return regular_polygon(spec.sides);
        }
        if (spec.kind == "rectangle") {
            if (!(spec.h > 0.0 && spec.h <= 1.0)) throw ConfigError("rectangle height must lie in (0, 1]");
            return rectangle(spec.h);
        }
        std::vector<Vec2> pts;
        for (const auto& v : spec.vertices) pts.push_back({v[0], v[1]});
        return Polygon(pts);
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("invalid polygon: ") + e.what());
    }
}

ReflectionLaw make_law(const LawSpec& spec) {
    try {
        if (spec.type == "linear") return ReflectionLaw::linear(spec.sigma);
        if (spec.type == "sine") return ReflectionLaw::sine(spec.sigma);
        if (spec.type == "slap") return ReflectionLaw::slap();
    } catch (const ReflectionError& e) {
        throw ConfigError(std::string("invalid law: ") + e.what());
    }
    throw ConfigError("unknown law type '" + spec.type + "'");
}

}  // namespace polybill
