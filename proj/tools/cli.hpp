#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deltacnn::cli {

// Entry point shared by the executable and the tests. args excludes the
// program name. Data goes to `out` (or --csv files), diagnostics to `err`.
// Returns 0 iff the command completed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "0,0.05,0.1" -> sorted, deduplicated taus. Throws ConfigError on negative,
// non-finite or unparsable entries.
std::vector<float> parse_tau_list(const std::string& text);

// Shortest decimal text that reads back to the same value.
std::string format_number(double value);
std::string format_number(float value);

}  // namespace deltacnn::cli
