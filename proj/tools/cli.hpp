#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lshbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUnattained = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "lo:hi:step", "lo:hi" (step 1) or "a,b,c".
std::vector<double> parse_real_list(const std::string& spec);
std::vector<std::size_t> parse_size_list(const std::string& spec);

}  // namespace lshbench::cli
