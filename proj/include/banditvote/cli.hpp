#pragma once

namespace banditvote {

// Entry point behind the banditvote binary; also callable in-process.
int cli(int argc, const char* const* argv);

}  // namespace banditvote
