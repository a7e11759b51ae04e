#pragma once

#include <iosfwd>
#include <string>

#include "mtlplan/milp_model.hpp"

namespace mtlplan::milp {

// Text serialization in the common LP file dialect: Minimize /
// Subject To / Bounds / Binaries / End.  Every variable gets an
// explicit bounds line, so a written model reads back with the same
// bounds regardless of format defaults.
void write_lp(const MilpModel& model, std::ostream& os);
std::string write_lp_string(const MilpModel& model);

// Accepts the subset written above plus a few conveniences: Maximize
// (negated into minimize form), >= rows (negated into <=), and
// objective constants.  Variables appear in first-use order.
MilpModel read_lp(std::istream& is);
MilpModel read_lp_string(const std::string& text);

}  // namespace mtlplan::milp
