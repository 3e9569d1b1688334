#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlsnf::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kConfigError = 2, kNumericalAbort = 3 };

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// K from {"K": x}, {"N": n, "delta": d} or {"T": t, "delta": d}.
double resolve_K(double K, double N, double T, double delta);

}  // namespace nlsnf::cli
