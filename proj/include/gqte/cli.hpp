#pragma once

#include <string>
#include <vector>

namespace gqte {

// Headerless single-column CSV of positive reals: one value per line, with
// an optional power transform y -> y^power applied on ingest. Malformed
// content raises InputError naming the file and line.
std::vector<double> read_sample_file(const std::string& path, double power = 1.0);

// Entry point behind the gqte executable. Returns the process exit code:
// 0 success, 2 usage or parse failure, 3 infeasible model, 4 numeric failure.
int run_cli(int argc, const char* const* argv);

}  // namespace gqte
