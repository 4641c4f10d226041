#pragma once

namespace besovkit {

/// Entry point of the experiment runner. Returns the process exit code:
/// 0 success, 1 a reported check failed, 2 configuration error, 3 geometry error.
int run(int argc, char** argv);

}  // namespace besovkit
