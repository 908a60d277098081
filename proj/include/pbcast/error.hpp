#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pbcast {

// All library failures carry a stable, machine-parseable class string.
// The CLI prints "error: <class>: <message>" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string cls, const std::string& message)
        : std::runtime_error(message), cls_(std::move(cls)) {}

    const std::string& error_class() const noexcept { return cls_; }

private:
    std::string cls_;
};

namespace errc {
inline constexpr const char* usage = "usage";
inline constexpr const char* config = "config";
inline constexpr const char* io = "io";
inline constexpr const char* domain = "domain";
inline constexpr const char* generation_failure = "generation-failure";
inline constexpr const char* non_convergence = "non-convergence";
inline constexpr const char* numerical_failure = "numerical-failure";
inline constexpr const char* calibration_failure = "calibration-failure";
inline constexpr const char* degenerate_alpha = "degenerate-alpha";
inline constexpr const char* infeasible = "infeasible";
}  // namespace errc

}  // namespace pbcast
