#pragma once

#include <iosfwd>

// Entry point of the ncamaps command line. Exit codes: 0 success, 2 some sweep
// points diverged or failed, 1 usage / configuration / I/O error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
