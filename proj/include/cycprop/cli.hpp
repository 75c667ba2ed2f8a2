#pragma once

namespace cycprop {

// Entry point of the cycprop command line tool. Returns 0 on success, 1 on a
// runtime failure and 2 on a usage error; diagnostics go to stderr.
int cli_main(int argc, const char* const* argv);

}  // namespace cycprop
