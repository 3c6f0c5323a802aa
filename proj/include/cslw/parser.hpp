#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "cslw/model.hpp"

namespace cslw {

// Rule-program text format, one statement per line:
//   head ~ dist.
//   head ~ dist :- atom, atom, ... .
// dist: bernoulli(p) | discrete([v1:p1,...,vk:pk]) | gaussian(mean,stddev)
// atom: var=value | var<c | var=<c | var>c | var>=c
// `%` starts a comment; `:=` is accepted as a synonym for `:-`.
// Head domains come from the distributions ({0,1} for bernoulli, the listed
// values for discrete); a gaussian head is continuous.
RuleProgram parse_dcp(std::string_view text);          // validates; throws
RuleProgram parse_dcp_unchecked(std::string_view text);  // syntax only
RuleProgram load_dcp(const std::string& path);

// Rules grouped by head name (heads in name order, definition order within a
// head); probabilities printed with 17 significant digits so that
// parse(serialize(p)) reproduces p exactly.
std::string serialize_dcp(const RuleProgram& prog);

// Subset of the classic BIF format: network/variable/probability blocks,
// discrete variables, `table` entries and per-parent-configuration rows.
// Rows whose sum is within 1e-6 of 1 are renormalized; worse is an error.
Network parse_bif(std::string_view text);
Network load_bif(const std::string& path);

// Same variables (name, kind, domain) and, per head, the same rule sequence.
bool structurally_equal(const RuleProgram& a, const RuleProgram& b);

}  // namespace cslw
