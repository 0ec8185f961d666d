#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hmp
{

// Domain and target dimensions are desk scale.
inline constexpr int kMaxDim = 3;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Base of every error the library throws. `code()` doubles as the CLI exit status.
class Error : public std::runtime_error
{
public:
    Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int assertion_failed = 1;
inline constexpr int parse = 2;
inline constexpr int validation = 3;
inline constexpr int chart_exit = 4;
inline constexpr int unstable = 5;
inline constexpr int io = 6;
inline constexpr int range = 7;
inline constexpr int internal = 8;
} // namespace exit_code

struct ParseError : Error
{
    explicit ParseError(const std::string& w) : Error(exit_code::parse, "parse error: " + w) {}
};

struct ConfigError : Error
{
    explicit ConfigError(const std::string& w) : Error(exit_code::validation, "validation error: " + w) {}
};

/// A point outside the chart's validity region (Poincare ball exit, NaN, antipode).
struct ChartDomainError : Error
{
    explicit ChartDomainError(const std::string& w) : Error(exit_code::chart_exit, "chart exit: " + w) {}
};

/// xi = sqrt(d) cos(sqrt(d) rho) is only positive inside the cap rho < pi / (2 sqrt d).
struct OutOfCapError : Error
{
    explicit OutOfCapError(const std::string& w) : Error(exit_code::validation, "out of cap: " + w) {}
};

struct StabilityError : Error
{
    explicit StabilityError(const std::string& w) : Error(exit_code::unstable, "unstable: " + w) {}
};

struct RangeError : Error
{
    explicit RangeError(const std::string& w) : Error(exit_code::range, "range error: " + w) {}
};

struct IndexError : Error
{
    explicit IndexError(const std::string& w) : Error(exit_code::range, "index error: " + w) {}
};

struct IoError : Error
{
    explicit IoError(const std::string& w) : Error(exit_code::io, "io error: " + w) {}
};

} // namespace hmp
