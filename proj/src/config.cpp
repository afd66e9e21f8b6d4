#include "mather_twist/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mather_twist/errors.hpp"

namespace mather_twist {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& msg) {
    throw UsageError(source + ":" + std::to_string(line) + ": " + msg);
}

double to_real(std::string_view v, const std::string& key, const std::string& source, int line) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
        fail_at(source, line, "'" + key + "' expects a real number, got '" + std::string(v) + "'");
    return out;
}

template <class Int>
Int to_int(std::string_view v, const std::string& key, const std::string& source, int line) {
    Int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        fail_at(source, line, "'" + key + "' expects an integer, got '" + std::string(v) + "'");
    return out;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ToolConfig parse_config(std::string_view text, const std::string& source) {
    ToolConfig cfg;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail_at(source, line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(source, line_no, "missing key");
        if (value.empty()) fail_at(source, line_no, "missing value for '" + key + "'");
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') fail_at(source, line_no, "unterminated string");
            value = value.substr(1, value.size() - 2);
        }
        if (!seen.insert(key).second) fail_at(source, line_no, "duplicate key '" + key + "'");

        if (key == "family") {
            if (value == "standard") cfg.gf.family = Family::standard;
            else if (value == "custom") cfg.gf.family = Family::custom;
            else fail_at(source, line_no, "family must be \"standard\" or \"custom\"");
        } else if (key == "k") {
            cfg.gf.k = to_real(value, key, source, line_no);
        } else if (key == "expr") {
            cfg.gf.expr = std::string(value);
        } else if (key == "coercivity_window") {
            cfg.gf.coercivity_window = to_real(value, key, source, line_no);
        } else if (key == "tol.residual") {
            cfg.tol_residual = to_real(value, key, source, line_no);
        } else if (key == "tol.barrier") {
            cfg.tol_barrier = to_real(value, key, source, line_no);
        } else if (key == "joint_tol") {
            cfg.joint_tol = to_real(value, key, source, line_no);
        } else if (key == "grid.a") {
            cfg.grid_a = to_int<int>(value, key, source, line_no);
        } else if (key == "grid.dp") {
            cfg.grid_dp = to_int<int>(value, key, source, line_no);
        } else if (key == "farey_order") {
            cfg.farey_order = to_int<int>(value, key, source, line_no);
        } else if (key == "cf.depth") {
            cfg.cf_depth = to_int<int>(value, key, source, line_no);
        } else if (key == "dp.N") {
            cfg.dp_n = to_int<int>(value, key, source, line_no);
        } else if (key == "restarts") {
            cfg.restarts = to_int<int>(value, key, source, line_no);
        } else if (key == "seed") {
            cfg.seed = to_int<std::uint64_t>(value, key, source, line_no);
        } else {
            fail_at(source, line_no, "unknown key '" + key + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const ToolConfig& cfg) {
    const auto bad = [](const std::string& key, const std::string& why) {
        throw UsageError("config key '" + key + "': " + why);
    };
    if (cfg.gf.family == Family::standard && !(cfg.gf.k >= 0.0)) bad("k", "coupling must be >= 0");
    if (cfg.gf.family == Family::custom && cfg.gf.expr.empty()) bad("expr", "required for the custom family");
    if (!(cfg.gf.coercivity_window > 0.0)) bad("coercivity_window", "must be > 0");
    if (!(cfg.tol_residual > 0.0)) bad("tol.residual", "must be > 0");
    if (!(cfg.tol_barrier > 0.0)) bad("tol.barrier", "must be > 0");
    if (!(cfg.joint_tol > 0.0)) bad("joint_tol", "must be > 0");
    if (cfg.grid_a < 2) bad("grid.a", "must be >= 2");
    if (cfg.grid_dp < 2) bad("grid.dp", "must be >= 2");
    if (cfg.farey_order < 2) bad("farey_order", "must be >= 2");
    if (cfg.cf_depth < 2) bad("cf.depth", "must be >= 2");
    if (cfg.dp_n < 2) bad("dp.N", "must be >= 2");
    if (cfg.restarts < 1) bad("restarts", "must be >= 1");
    if (cfg.gf.family == Family::custom) {
        try {
            (void)Expression::parse(cfg.gf.expr);
        } catch (const UsageError& e) {
            bad("expr", e.what());
        }
    }
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string render_config(const ToolConfig& cfg) {
    std::ostringstream o;
    o << "family = \"" << (cfg.gf.family == Family::standard ? "standard" : "custom") << "\"\n";
    o << "k = " << fmt17(cfg.gf.k) << "\n";
    if (cfg.gf.family == Family::custom) o << "expr = \"" << cfg.gf.expr << "\"\n";
    o << "coercivity_window = " << fmt17(cfg.gf.coercivity_window) << "\n";
    o << "tol.residual = " << fmt17(cfg.tol_residual) << "\n";
    o << "tol.barrier = " << fmt17(cfg.tol_barrier) << "\n";
    o << "joint_tol = " << fmt17(cfg.joint_tol) << "\n";
    o << "grid.a = " << cfg.grid_a << "\n";
    o << "grid.dp = " << cfg.grid_dp << "\n";
    o << "farey_order = " << cfg.farey_order << "\n";
    o << "cf.depth = " << cfg.cf_depth << "\n";
    o << "dp.N = " << cfg.dp_n << "\n";
    o << "restarts = " << cfg.restarts << "\n";
    o << "seed = " << cfg.seed << "\n";
    return o.str();
}

}  // namespace mather_twist
