#pragma once

#include "qimpute/config.hpp"
#include "qimpute/tabular.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace testsupport {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(QIMPUTE_DATA_DIR) / name; }
inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(QIMPUTE_FIXTURE_DIR) / name;
}
inline std::filesystem::path config_path() { return std::filesystem::path(QIMPUTE_CONFIG_DIR) / "diabetes.json"; }

inline const std::vector<std::string> kImputeColumns = {"SkinThickness", "Insulin", "BloodPressure",
                                                        "BMI", "Glucose", "DiabetesPedigreeFunction"};

inline qimpute::Dataset diabetes() { return qimpute::load_csv(data_path("diabetes.csv"), "Outcome"); }
inline qimpute::PipelineConfig default_config() { return qimpute::load_config(config_path()); }

inline nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("qimpute-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
