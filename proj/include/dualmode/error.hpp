#pragma once

#include <stdexcept>
#include <string>

namespace dualmode {

/// Failure categories for every throwing operation in the library.
enum class errc {
    non_positive_rate,
    mode_ordering_violated,
    degenerate_modes,
    cloud_not_faster,
    infinite_rate,
    invalid_parameter,
    unstable,
    infeasible_fraction,
    infeasible_assignment,
    not_applicable,
    non_monotone_breakaway,
    unstable_simulation,
    degenerate_config,
    invalid_config,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::non_positive_rate: return "non_positive_rate";
        case errc::mode_ordering_violated: return "mode_ordering_violated";
        case errc::degenerate_modes: return "degenerate_modes";
        case errc::cloud_not_faster: return "cloud_not_faster";
        case errc::infinite_rate: return "infinite_rate";
        case errc::invalid_parameter: return "invalid_parameter";
        case errc::unstable: return "unstable";
        case errc::infeasible_fraction: return "infeasible_fraction";
        case errc::infeasible_assignment: return "infeasible_assignment";
        case errc::not_applicable: return "not_applicable";
        case errc::non_monotone_breakaway: return "non_monotone_breakaway";
        case errc::unstable_simulation: return "unstable_simulation";
        case errc::degenerate_config: return "degenerate_config";
        case errc::invalid_config: return "invalid_config";
    }
    return "unknown";
}

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace dualmode
