#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polybill/billiard.hpp"

namespace polybill {

// Malformed or inconsistent configuration; the CLI exits with status 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unreadable input or unwritable output; the CLI exits with status 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PolygonSpec {
    std::string kind = "regular";  // regular | rectangle | vertices
    int sides = 3;
    double h = 1.0;
    std::vector<std::array<double, 2>> vertices;

    bool operator==(const PolygonSpec&) const = default;
};

struct LawSpec {
    std::string type = "linear";  // linear | sine | slap
    double sigma = 0.3;

    bool operator==(const LawSpec&) const = default;
};

// Horizontal segments for the growth check: side `edge`, local arclength [from, to] as a
// fraction of the side, at each angle in `thetas` (or `levels` random angles in the strip).
struct GammaSpec {
    int edge = 0;
    double from = 0.05;
    double to = 0.95;
    std::vector<double> thetas;
    int levels = 5;

    bool operator==(const GammaSpec&) const = default;
};

struct ExperimentConfig {
    std::string command;
    PolygonSpec polygon;
    LawSpec law;
    long n = 1000;
    int seeds = 10;
    int n_orbits = 64;
    int n_transient = 1000;
    int n_keep = 10000;
    int grid_s = 512;
    int grid_theta = 512;
    std::vector<double> eps_list = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    int m = 6;
    int resolution = 100;
    int samples = 1 << 20;
    std::string theorem;
    GammaSpec gamma;
    std::vector<double> sigma_list;
    std::vector<double> h_list;
    std::uint64_t rng_seed = 1;
    std::string output = ".";

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Unknown keys and values of the wrong type are rejected with ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

Polygon make_polygon(const PolygonSpec& spec);
ReflectionLaw make_law(const LawSpec& spec);

}  // namespace polybill
