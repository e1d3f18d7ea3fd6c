#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace opalg {

// One command-line job. Perversities are given as comma-separated value
// lists ("0,0,0,1"); an empty list or "all" selects every GM perversity.
struct JobConfig {
    std::string command;
    std::string input;
    std::uint32_t field = 2;
    int max_bar_length = 4;
    int window_lo = 0;
    int window_hi = 4;
    int env_arity = 0;
    int env_degree = 2;
    std::vector<std::string> perversities;
    int samples = 1000;
    std::uint32_t seed = 1;

    // Throws InputError on an unknown command or out-of-range settings.
    void validate() const;
};

// Runs the job and returns its report. Throws InputError on bad input and
// MathError when a computation hits an inconsistency.
nlohmann::json run_job(const JobConfig& cfg);

// {"error": {"kind": ..., "message": ...}}
nlohmann::json error_report(const std::string& kind, const std::string& message);

// "lo:hi" with lo <= hi.
void parse_window(const std::string& text, int& lo, int& hi);

}  // namespace opalg
