#include "mather_twist/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mather_twist/errors.hpp"

namespace mather_twist {

using Json = nlohmann::ordered_json;

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// nlohmann writes the shortest round-trip form; we want %.17g everywhere.
void emit(const Json& j, std::string& out, int indent, int level) {
    const auto newline = [&](int lvl) {
        out += '\n';
        out.append(static_cast<std::size_t>(indent * lvl), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(level + 1);
                out += Json(it.key()).dump();
                out += ": ";
                emit(it.value(), out, indent, level + 1);
            }
            newline(level);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                newline(level + 1);
                emit(v, out, indent, level + 1);
            }
            newline(level);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_real(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

std::string render(const Json& j) {
    std::string out;
    emit(j, out, 2, 0);
    out += '\n';
    return out;
}

double mod1(double x) { return x - std::floor(x); }

}  // namespace

std::string orbit_csv(const OrbitSample& orbit) {
    std::string s = "i,x,y,x_mod1\n";
    for (std::size_t i = 0; i < orbit.points.size(); ++i) {
        const auto& p = orbit.points[i];
        s += std::to_string(i) + "," + format_real(p.x) + "," + format_real(p.y) + "," + format_real(mod1(p.x)) + "\n";
    }
    return s;
}

std::string configuration_csv(const Configuration& c) {
    std::string s = "i,x\n";
    for (std::size_t i = 0; i < c.xs.size(); ++i) s += std::to_string(i) + "," + format_real(c.xs[i]) + "\n";
    return s;
}

std::string convergents_csv(const ConvergentList& cl) {
    std::string s = "p,q,omega_approx,abs_err\n";
    for (const auto& rc : cl.entries)
        s += std::to_string(rc.p) + "," + std::to_string(rc.q) + "," + format_real(rc.value()) + "," +
             format_real(std::abs(cl.omega - rc.value())) + "\n";
    return s;
}

std::string barrier_csv(const BarrierProfile& p) {
    std::string s = "a,value\n";
    for (std::size_t i = 0; i < p.values.size(); ++i) s += format_real(p.grid[i]) + "," + format_real(p.values[i]) + "\n";
    return s;
}

std::string beta_csv(const BetaSamples& b) {
    std::string s = "p,q,omega,beta\n";
    for (const auto& e : b.entries)
        s += std::to_string(e.rc.p) + "," + std::to_string(e.rc.q) + "," + format_real(e.omega) + "," +
             format_real(e.beta) + "\n";
    return s;
}

std::string alpha_csv(const ConjugateSamples& a) {
    std::string s = "c,alpha\n";
    for (const auto& [c, v] : a.entries) s += format_real(c) + "," + format_real(v) + "\n";
    return s;
}

std::string minimizer_json(const MinimizerResult& m) {
    Json j;
    j["p"] = m.config.rc.p;
    j["q"] = m.config.rc.q;
    j["action"] = m.action;
    j["residual_inf"] = m.residual_inf;
    j["restarts_used"] = m.restarts_used;
    j["seed"] = m.seed;
    return render(j);
}

std::string verdict_json(const CircleTest& t, int depth) {
    Json j;
    j["omega"] = t.evidence.profile.omega;
    j["depth"] = depth;
    j["max_barrier"] = t.max_barrier;
    j["trend"] = to_string(t.evidence.diagnostics.trend);
    j["verdict"] = to_string(t.verdict);
    j["tol"] = t.tol;
    Json classes = Json::array();
    for (std::size_t i = 0; i < t.evidence.diagnostics.classes.size(); ++i) {
        const auto& rc = t.evidence.diagnostics.classes[i];
        classes.push_back({{"p", rc.p}, {"q", rc.q}, {"max_barrier", t.evidence.diagnostics.max_by_depth[i]}});
    }
    j["convergent_maxima"] = classes;
    j["slope"] = t.evidence.diagnostics.slope;
    return render(j);
}

std::string instability_json(const InstabilityReport& r) {
    Json j;
    j["k"] = r.k;
    j["grid"] = r.grid;
    Json verdicts = Json::array();
    for (std::size_t i = 0; i < r.verdicts.size(); ++i)
        verdicts.push_back({{"omega", r.grid[i]}, {"verdict", to_string(r.verdicts[i])}, {"max_barrier", r.max_barrier[i]}});
    j["verdicts"] = verdicts;
    Json intervals = Json::array();
    for (const auto& iv : r.intervals) {
        Json e;
        e["a"] = iv.a;
        e["b"] = iv.b;
        e["surviving_below"] = iv.surviving_below ? Json(*iv.surviving_below) : Json(nullptr);
        e["surviving_above"] = iv.surviving_above ? Json(*iv.surviving_above) : Json(nullptr);
        intervals.push_back(e);
    }
    j["intervals"] = intervals;
    return render(j);
}

std::string connecting_json(const ConnectingResult& r) {
    Json j;
    Json schedule = Json::array();
    for (std::size_t i = 0; i < r.schedule.size(); ++i)
        schedule.push_back({{"p", r.schedule[i].p}, {"q", r.schedule[i].q}, {"T", r.lengths[i]},
                            {"c", r.closed_forms[i]}});
    j["schedule"] = schedule;
    j["joint_residuals"] = r.joint_residuals;
    j["verdict"] = to_string(r.verdict);
    if (!r.joint_residuals.empty()) j["worst_joint"] = r.worst_joint;
    j["max_interior_residual"] = r.max_interior_residual;
    return render(j);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write '" + path + "'");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw UsageError("write failed for '" + path + "'");
}

std::string iso8601(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string RunManifest::to_json() const {
    Json j;
    j["version"] = version;
    Json cfg;
    cfg["family"] = config.gf.family == Family::standard ? "standard" : "custom";
    cfg["k"] = config.gf.k;
    if (config.gf.family == Family::custom) cfg["expr"] = config.gf.expr;
    cfg["coercivity_window"] = config.gf.coercivity_window;
    cfg["tol.residual"] = config.tol_residual;
    cfg["tol.barrier"] = config.tol_barrier;
    cfg["joint_tol"] = config.joint_tol;
    cfg["grid.a"] = config.grid_a;
    cfg["grid.dp"] = config.grid_dp;
    cfg["farey_order"] = config.farey_order;
    cfg["cf.depth"] = config.cf_depth;
    cfg["dp.N"] = config.dp_n;
    cfg["restarts"] = config.restarts;
    cfg["seed"] = config.seed;
    j["config"] = cfg;
    j["seed"] = config.seed;
    j["command"] = command;
    j["started"] = iso8601(started);
    j["finished"] = iso8601(finished);
    Json tm = Json::object();
    for (const auto& [op, s] : timings) tm[op] = s;
    j["timings_s"] = tm;
    Json dg = Json::object();
    for (const auto& [f, d] : digests) dg[f] = "sha256:" + d;
    j["outputs"] = dg;
    return render(j);
}

}  // namespace mather_twist
