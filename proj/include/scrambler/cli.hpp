#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scrambler/oracle.hpp"

namespace scrambler::cli {

enum class Format { kCsv, kJson };

struct RunConfig {
    std::string subcommand;
    std::string input;         // file path or inline JSON ("{...}")
    std::string output = "-";  // "-" is standard output
    Format format = Format::kCsv;
    std::optional<std::uint64_t> seed;
    std::map<std::string, double> tolerances;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitNumerical = 2,
    kExitUsage = 3,
    kExitIo = 4,
};

const std::vector<std::string>& subcommands();

// Dispatches one subcommand, writes its artifacts and returns the exit code.
// Diagnostics (and the manifest when writing to standard output) go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

nlohmann::json load_config(const std::string& input);

oracle::OracleConfig oracle_config_from_json(const nlohmann::json& doc);

// 17 significant digits, "inf"/"nan" spelled out.
std::string format_number(double v);

// Writes to path.tmp.<pid> and renames over path.
void write_atomic(const std::string& path, const std::string& content);

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<SuiteResult> run_validation_suites();

}  // namespace scrambler::cli
