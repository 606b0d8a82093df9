// SPDX-License-Identifier: Apache-2.0
#include "pilotcov/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pilotcov {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::vector<std::string> split_list(const std::string& field, const std::string& value) {
    std::string body = value;
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw ConfigError(field, "unterminated list");
        body = body.substr(1, body.size() - 2);
    }
    std::vector<std::string> items;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unquote(trim(item));
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double to_double(const std::string& field, const std::string& v) {
    double out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError(field, "expected a number, got '" + v + "'");
    return out;
}

long long to_integer(const std::string& field, const std::string& v) {
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError(field, "expected an integer, got '" + v + "'");
    return out;
}

int to_int(const std::string& field, const std::string& v) { return static_cast<int>(to_integer(field, v)); }

}  // namespace

const char* estimator_label(Estimator e) {
    switch (e) {
        case Estimator::LS: return "LS";
        case Estimator::CB: return "CB";
        case Estimator::CPA: return "CPA";
        case Estimator::NoInt: return "no-int";
    }
    return "?";
}

Estimator parse_estimator(const std::string& label) {
    std::string l = label;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "ls") return Estimator::LS;
    if (l == "cb") return Estimator::CB;
    if (l == "cpa") return Estimator::CPA;
    if (l == "no-int" || l == "noint" || l == "no_int") return Estimator::NoInt;
    throw ConfigError("estimators", "unknown estimator '" + label + "'");
}

std::vector<Estimator> parse_estimator_list(const std::string& list) {
    std::vector<Estimator> out;
    for (const auto& item : split_list("estimators", list)) {
        const Estimator e = parse_estimator(item);
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
    return out;
}

bool ExperimentConfig::uses(Estimator e) const {
    return std::find(estimators.begin(), estimators.end(), e) != estimators.end();
}

void ExperimentConfig::validate() const {
    if (cells != 2 && cells != 7) throw ConfigError("cells", "supported layouts are 2 and 7 cells");
    if (users_per_cell < 1) throw ConfigError("users_per_cell", "must be >= 1");
    if (!(cell_radius_m > 0)) throw ConfigError("cell_radius_m", "must be > 0");
    if (!(user_distance_m > 0) || user_distance_m > cell_radius_m)
        throw ConfigError("user_distance_m", "must lie in (0, cell_radius_m]");
    if (pilot_len < 1) throw ConfigError("pilot_len", "must be >= 1");
    if (!(spacing_ratio > 0) || spacing_ratio > 0.5) throw ConfigError("spacing_ratio", "must lie in (0, 0.5]");
    if (num_paths < 1) throw ConfigError("num_paths", "must be >= 1");
    if (!(spread_deg > 0)) throw ConfigError("spread_deg", "must be > 0");
    if (num_antennas < 1) throw ConfigError("num_antennas", "must be >= 1");
    if (sweep == SweepVariable::Antennas) {
        if (antennas.empty()) throw ConfigError("antennas", "sweep list must be nonempty");
        for (int m : antennas)
            if (m < 1) throw ConfigError("antennas", "antenna counts must be >= 1");
    } else {
        if (sigmas_deg.empty()) throw ConfigError("sigmas_deg", "sweep list must be nonempty");
        for (double s : sigmas_deg)
            if (!(s > 0)) throw ConfigError("sigmas_deg", "standard deviations must be > 0");
    }
    if (estimators.empty()) throw ConfigError("estimators", "estimator set must be nonempty");
    if (trials < 1) throw ConfigError("trials", "must be >= 1");
    if (threads < 1) throw ConfigError("threads", "must be >= 1");
    if (quadrature_nodes < 32) throw ConfigError("quadrature_nodes", "must be >= 32");
    if (out.empty()) throw ConfigError("out", "output path must be nonempty");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (kv.count(key)) throw ConfigError(key, "duplicate key");
        kv[key] = value;
    }
    return kv;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    for (const auto& [key, v] : parse_key_values(text)) {
        if (key == "cells") c.cells = to_int(key, v);
        else if (key == "users_per_cell") c.users_per_cell = to_int(key, v);
        else if (key == "cell_radius_m") c.cell_radius_m = to_double(key, v);
        else if (key == "user_distance_m") c.user_distance_m = to_double(key, v);
        else if (key == "pathloss_exponent") c.pathloss_exponent = to_double(key, v);
        else if (key == "edge_snr_db") c.edge_snr_db = to_double(key, v);
        else if (key == "pilot_len") c.pilot_len = to_int(key, v);
        else if (key == "spacing_ratio") c.spacing_ratio = to_double(key, v);
        else if (key == "num_paths") c.num_paths = to_int(key, v);
        else if (key == "user_angle_deg") c.user_angle_deg = to_double(key, v);
        else if (key == "aoa") {
            if (v == "uniform") c.aoa = AngularSpread::Kind::Uniform;
            else if (v == "gaussian") c.aoa = AngularSpread::Kind::Gaussian;
            else throw ConfigError(key, "expected 'uniform' or 'gaussian'");
        } else if (key == "spread_deg") c.spread_deg = to_double(key, v);
        else if (key == "num_antennas") c.num_antennas = to_int(key, v);
        else if (key == "sweep") {
            if (v == "m") c.sweep = SweepVariable::Antennas;
            else if (v == "sigma") c.sweep = SweepVariable::Sigma;
            else throw ConfigError(key, "expected 'm' or 'sigma'");
        } else if (key == "antennas") {
            c.antennas.clear();
            for (const auto& item : split_list(key, v)) c.antennas.push_back(to_int(key, item));
        } else if (key == "sigmas_deg") {
            c.sigmas_deg.clear();
            for (const auto& item : split_list(key, v)) c.sigmas_deg.push_back(to_double(key, item));
        } else if (key == "estimators") c.estimators = parse_estimator_list(v);
        else if (key == "trials") c.trials = to_int(key, v);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_integer(key, v));
        else if (key == "out") c.out = v;
        else if (key == "threads") c.threads = to_int(key, v);
        else if (key == "quadrature_nodes") c.quadrature_nodes = to_int(key, v);
        else throw ConfigError(key, "unknown key");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace pilotcov
