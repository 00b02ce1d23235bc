#include "ril/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ril {

namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kKeys = {
    "tilt.d", "tilt.u", "tilt.u_starstar", "tilt.epsilon", "tilt.delta", "tilt.eta", "tilt.r_U", "tilt.shape",
    "tilt.size", "tilt.center", "tilt.N", "tilt.grid_spacing",
    "experiment.window_radius", "experiment.window_radii", "experiment.N_list", "experiment.replicas",
    "experiment.seed", "experiment.escape_tol", "experiment.r1", "experiment.r2", "experiment.r3", "experiment.r4",
    "experiment.gamma_samples", "experiment.beta_walks", "experiment.levels", "experiment.comparison_level",
    "experiment.threads",
    "sets.M", "sets.tilted", "green.flavor", "green.killed_radius", "tilt_build.axis_radius"};

template <class T>
T parse_as(const std::string& key, const std::string& v) {
    std::istringstream is(v);
    T x;
    is >> x;
    std::string rest;
    if (is.fail() || (is >> rest)) throw std::invalid_argument("config key " + key + ": cannot parse '" + v + "'");
    return x;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
    std::string s = v;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    std::vector<T> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_as<T>(key, tok));
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key " + key + ": expected a boolean, got '" + v + "'");
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

SiteSet parse_set(const std::string& spec, int d) {
    if (spec == "origin") {
        SiteSet s(d);
        s.insert(Site::zero(d));
        return s;
    }
    if (spec == "pair") {
        SiteSet s(d);
        s.insert(Site::zero(d));
        Site e = Site::zero(d);
        e[0] = 1;
        s.insert(e);
        return s;
    }
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("sets.M: unknown set '" + spec + "'");
    const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    if (kind == "box") return sup_ball(d, parse_as<int>("sets.M", arg));
    if (kind == "ball") return euclid_ball(Site::zero(d), parse_as<double>("sets.M", arg));
    if (kind == "file") {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("sets.M: cannot open " + arg);
        return read_siteset(in, d);
    }
    throw std::invalid_argument("sets.M: unknown set kind '" + kind + "'");
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    pt::ptree tree;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config file " + path);
        try {
            pt::read_ini(in, tree);
        } catch (const pt::ini_parser_error& e) {
            throw std::invalid_argument(std::string("config parse error: ") + e.what());
        }
    }
    std::map<std::string, std::string> kv;
    for (const auto& [section, sub] : tree) {
        if (sub.empty() && !sub.data().empty()) throw std::invalid_argument("config key " + section + " lies outside any section");
        for (const auto& [key, val] : sub) kv[section + "." + key] = val.data();
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("override '" + o + "' is not key=value");
        kv[o.substr(0, eq)] = o.substr(eq + 1);
    }
    for (const auto& [k, v] : kv)
        if (!kKeys.count(k)) throw std::invalid_argument("unknown config key " + k);
    if (!kv.count("tilt.u_starstar")) throw std::invalid_argument("missing required key tilt.u_starstar (the level u_**)");

    RunConfig rc;
    ExperimentConfig& e = rc.exp;
    TiltParams& t = e.tilt;
    // defaults: the tiny point fixture
    t.u = 0.4;
    t.epsilon = 0.2;
    t.delta = 0.3;
    t.eta = 0.05;
    t.r_U = 0.85;
    t.N = 10;
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("tilt.d")) t.d = parse_as<int>("tilt.d", *v);
    if (auto v = get("tilt.u")) t.u = parse_as<double>("tilt.u", *v);
    t.u_star2 = parse_as<double>("tilt.u_starstar", *get("tilt.u_starstar"));
    if (auto v = get("tilt.epsilon")) t.epsilon = parse_as<double>("tilt.epsilon", *v);
    if (auto v = get("tilt.delta")) t.delta = parse_as<double>("tilt.delta", *v);
    if (auto v = get("tilt.eta")) t.eta = parse_as<double>("tilt.eta", *v);
    if (auto v = get("tilt.r_U")) t.r_U = parse_as<double>("tilt.r_U", *v);
    if (auto v = get("tilt.N")) t.N = parse_as<int>("tilt.N", *v);
    if (auto v = get("tilt.grid_spacing")) t.grid_spacing = parse_as<double>("tilt.grid_spacing", *v);
    std::string shape = "point";
    if (auto v = get("tilt.shape")) shape = *v;
    if (shape == "point")
        t.shape.kind = ShapeKind::point;
    else if (shape == "ball")
        t.shape.kind = ShapeKind::ball;
    else if (shape == "box")
        t.shape.kind = ShapeKind::box;
    else
        throw std::invalid_argument("tilt.shape must be point, ball or box");
    if (auto v = get("tilt.size")) t.shape.size = parse_as<double>("tilt.size", *v);
    t.shape.center.assign(static_cast<std::size_t>(std::max(t.d, 0)), 0.0);
    if (auto v = get("tilt.center")) {
        t.shape.center = parse_list<double>("tilt.center", *v);
        if (static_cast<int>(t.shape.center.size()) != t.d) throw std::invalid_argument("tilt.center must have d coordinates");
    }

    if (auto v = get("experiment.window_radius")) e.window_radius = parse_as<int>("experiment.window_radius", *v);
    if (auto v = get("experiment.window_radii")) e.window_radii = parse_list<int>("experiment.window_radii", *v);
    if (auto v = get("experiment.N_list")) e.N_list = parse_list<int>("experiment.N_list", *v);
    if (auto v = get("experiment.replicas")) e.replicas = parse_as<long long>("experiment.replicas", *v);
    if (auto v = get("experiment.seed")) e.seed = parse_as<std::uint64_t>("experiment.seed", *v);
    if (auto v = get("experiment.escape_tol")) e.escape_tol = parse_as<double>("experiment.escape_tol", *v);
    if (auto v = get("experiment.r1")) e.r1 = parse_as<double>("experiment.r1", *v);
    if (auto v = get("experiment.r2")) e.r2 = parse_as<double>("experiment.r2", *v);
    if (auto v = get("experiment.r3")) e.r3 = parse_as<double>("experiment.r3", *v);
    if (auto v = get("experiment.r4")) e.r4 = parse_as<double>("experiment.r4", *v);
    if (auto v = get("experiment.gamma_samples")) e.gamma_samples = parse_as<int>("experiment.gamma_samples", *v);
    if (auto v = get("experiment.beta_walks")) e.beta_walks = parse_as<long long>("experiment.beta_walks", *v);
    if (auto v = get("experiment.threads")) e.threads = parse_as<int>("experiment.threads", *v);
    if (auto v = get("experiment.levels")) rc.levels = parse_list<double>("experiment.levels", *v);
    if (auto v = get("experiment.comparison_level")) rc.comparison_level = parse_as<double>("experiment.comparison_level", *v);
    if (auto v = get("sets.M")) rc.set_M = *v;
    if (auto v = get("sets.tilted")) rc.tilted = parse_bool("sets.tilted", *v);
    if (auto v = get("green.flavor")) rc.green_flavor = *v;
    if (auto v = get("green.killed_radius")) rc.killed_radius = parse_as<int>("green.killed_radius", *v);
    if (auto v = get("tilt_build.axis_radius")) rc.profile_axis = parse_as<int>("tilt_build.axis_radius", *v);
    if (rc.green_flavor != "free" && rc.green_flavor != "killed" && rc.green_flavor != "tilted")
        throw std::invalid_argument("green.flavor must be free, killed or tilted");
    for (double u : rc.levels)
        if (u < 0) throw std::invalid_argument("experiment.levels must be nonnegative");

    e.validate();

    // resolved view, threads excluded: results do not depend on them
    auto& r = rc.resolved;
    r["tilt.d"] = std::to_string(t.d);
    r["tilt.u"] = fmt(t.u);
    r["tilt.u_starstar"] = fmt(t.u_star2);
    r["tilt.epsilon"] = fmt(t.epsilon);
    r["tilt.delta"] = fmt(t.delta);
    r["tilt.eta"] = fmt(t.eta);
    r["tilt.r_U"] = fmt(t.r_U);
    r["tilt.N"] = std::to_string(t.N);
    r["tilt.grid_spacing"] = fmt(t.grid_spacing);
    r["tilt.shape"] = shape;
    r["tilt.size"] = fmt(t.shape.size);
    std::string c;
    for (double x : t.shape.center) c += (c.empty() ? "" : " ") + fmt(x);
    r["tilt.center"] = c;
    r["experiment.window_radius"] = std::to_string(e.window_radius);
    auto join_i = [](const std::vector<int>& v) {
        std::string s;
        for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
        return s;
    };
    r["experiment.window_radii"] = join_i(e.window_radii);
    r["experiment.N_list"] = join_i(e.N_list);
    r["experiment.replicas"] = std::to_string(e.replicas);
    r["experiment.seed"] = std::to_string(e.seed);
    r["experiment.escape_tol"] = fmt(e.escape_tol);
    r["experiment.r1"] = fmt(e.r1);
    r["experiment.r2"] = fmt(e.r2);
    r["experiment.r3"] = fmt(e.r3);
    r["experiment.r4"] = fmt(e.r4);
    r["experiment.gamma_samples"] = std::to_string(e.gamma_samples);
    r["experiment.beta_walks"] = std::to_string(e.beta_walks);
    std::string lv;
    for (double u : rc.levels) lv += (lv.empty() ? "" : " ") + fmt(u);
    r["experiment.levels"] = lv;
    r["experiment.comparison_level"] = fmt(rc.comparison_level);
    r["sets.M"] = rc.set_M;
    r["sets.tilted"] = rc.tilted ? "true" : "false";
    r["green.flavor"] = rc.green_flavor;
    r["green.killed_radius"] = std::to_string(rc.killed_radius);
    r["tilt_build.axis_radius"] = std::to_string(rc.profile_axis);
    return rc;
}

std::string config_hash(const std::string& command, const RunConfig& rc) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto eat = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        h ^= 0x0a;
        h *= 0x100000001b3ull;
    };
    eat(command);
    for (const auto& [k, v] : rc.resolved) eat(k + "=" + v);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ril
