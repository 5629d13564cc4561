#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "neumag/surface.hpp"

namespace neumag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Everything a subcommand needs; built from defaults, an optional JSON
/// config file, then command-line overrides.
struct RunConfig {
    nlohmann::json surface = "ellipsoid";
    int resolution = 4000;
    std::vector<double> epsilon{0.04, 0.02, 0.01};
    std::vector<double> h{0.0625, 0.015625, 0.00390625};
    int n_max = 3;
    int num_samples = 257;
    int quantize_points = 512;
    std::filesystem::path out = ".";
    /// Nothing in the pipeline draws random numbers; recorded for the hash.
    static constexpr bool deterministic = true;

    /// Throws InvalidArgument on non-positive values or empty lists, and
    /// sorts the epsilon and h lists in descending order.
    void validate();
    nlohmann::json to_json() const;
    /// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
    std::string hash() const;
};

/// Accepts a preset name or an object {"kind": "ellipsoid", "a", "b", "c"},
/// {"kind": "egg", "a", "b", "c", "k"} or {"kind": "preset", "name"}.
geometry::Surface surface_from_json(const nlohmann::json& desc);

/// Parses arguments and runs one subcommand. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace neumag::cli
