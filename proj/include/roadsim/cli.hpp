#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace roadsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;      // config or usage error
inline constexpr int kExitInfeasible = 3;  // scenario cannot be built
inline constexpr int kExitInternal = 4;    // invariant breach

struct SimulateOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    bool emit_svg = true;
};

struct SweepOptions {
    std::string kind;  // "density" or "penetration"
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    int parallel = 1;
    bool emit_svg = true;
};

struct CbaOptions {
    std::string profile_path;
    std::string out_dir;
    bool emit_svg = true;
};

// Each command writes its outputs plus a manifest.json declaring them, and
// returns one of the exit codes above. Diagnostics go to stderr.
int cmd_simulate(const SimulateOptions& options);
int cmd_sweep(const SweepOptions& options);
int cmd_cba(const CbaOptions& options);

}  // namespace roadsim::cli
