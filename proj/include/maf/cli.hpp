#pragma once
// Command-line front end. main() only forwards to run_cli.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace maf {

// Exit codes
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitBadFlags = 2;
constexpr int kExitUnknownName = 3;
constexpr int kExitVerifyFailed = 4;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct GridAxis {
    std::string name;
    double min = 0, max = 0;
    int count = 1;  // 1 only for a pinned coordinate "z=0.3"
    double at(int i) const;
};

// Axes in coordinate order, last axis fastest.
struct GridSpec {
    std::vector<GridAxis> axes;
    std::size_t size() const;
    std::vector<double> point(std::size_t index) const;
};

// "x=a:b:n,y=a:b:n" over the given coordinate names; unnamed coordinates must
// be pinned with "name=value".
GridSpec parse_grid(const std::string& text, const std::vector<std::string>& coords);

// Shortest decimal that round-trips, "nan" for NaN.
std::string format_number(double v);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maf
