#pragma once

// CSV/JSON renderings of results and run manifests. Numbers are written with
// 17 significant digits so they read back bit-exactly.

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "mather_twist/barriers.hpp"
#include "mather_twist/config.hpp"
#include "mather_twist/mather_structures.hpp"
#include "mather_twist/rotation.hpp"
#include "mather_twist/twist_dynamics.hpp"
#include "mather_twist/variational.hpp"

namespace mather_twist {

std::string format_real(double v);

std::string orbit_csv(const OrbitSample& orbit);                     // i,x,y,x_mod1
std::string configuration_csv(const Configuration& c);               // i,x
std::string convergents_csv(const ConvergentList& cl);               // p,q,omega_approx,abs_err
std::string barrier_csv(const BarrierProfile& p);                    // a,value
std::string beta_csv(const BetaSamples& s);                          // p,q,omega,beta
std::string alpha_csv(const ConjugateSamples& s);                    // c,alpha

std::string minimizer_json(const MinimizerResult& m);
std::string verdict_json(const CircleTest& t, int depth);
std::string instability_json(const InstabilityReport& r);
std::string connecting_json(const ConnectingResult& r);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Writes bytes to path, replacing any existing file. Throws UsageError when
/// the file cannot be written.
void write_file(const std::string& path, const std::string& bytes);

struct RunManifest {
    std::string version;
    ToolConfig config;
    std::string command;
    std::chrono::system_clock::time_point started, finished;
    std::vector<std::pair<std::string, double>> timings;  ///< operation, seconds
    std::map<std::string, std::string> digests;          ///< file name -> sha256

    std::string to_json() const;
};

/// ISO 8601 UTC with second resolution.
std::string iso8601(std::chrono::system_clock::time_point t);

}  // namespace mather_twist
