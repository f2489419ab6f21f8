#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "truckpark/scenario.hpp"

namespace truckpark::test {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("truckpark_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Small lot with a flat demand, for tests that need a quick simulation.
inline ScenarioConfig small_config(std::int64_t days = 3, std::uint64_t seed = 7) {
    ScenarioConfig c = default_config();
    c.capacities = {10, 2, 1};
    c.arrivals.hourly_rates.fill(4.0);
    c.horizon_days = days;
    c.master_seed = seed;
    return c;
}

inline std::string shipped_config_path() { return std::string(TRUCKPARK_SOURCE_DIR) + "/configs/default_scenario.json"; }

} // namespace truckpark::test
