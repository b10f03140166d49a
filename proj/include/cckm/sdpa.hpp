#pragma once

#include "cckm/conic.hpp"

#include <iosfwd>

namespace cckm {

// SDPA sparse format (see docs/formats.md). Equality rows are written as pairs of
// diagonal-block inequalities; the objective constant goes into a leading comment.
void write_sdpa(std::ostream& os, const ConicProgram& p);

// Reads an SDPA sparse file into a program over one vector block "x". Diagonal blocks
// become NonNeg families and matrix blocks Psd families.
ConicProgram read_sdpa(std::istream& is);

// Line-oriented description of blocks, objective and every constraint row.
void dump_text(std::ostream& os, const ConicProgram& p);

}  // namespace cckm
