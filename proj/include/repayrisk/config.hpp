#pragma once

#include <iosfwd>
#include <string>

#include "repayrisk/model.hpp"

namespace repayrisk::config {

// Model + loan description parsed from a dotted-key text config:
//
//   arrivals.kind = exponential | erlang | randomized_exponential
//   arrivals.lambda = <rate>          (exponential, erlang)
//   arrivals.k = <shape>              (erlang: integer >= 1; randomized: real > 0)
//   arrivals.theta = <scale>          (randomized)
//   severity.alpha = <rate>
//   loan.u = <loan size>
//   loan.c = <repayment rate per unit time>
//
// '#' starts a comment. Unknown keys are rejected; every error names the
// offending key.
struct RunConfig {
    model::DisasterModel disaster;
    model::LoanSpec loan;

    static RunConfig parse(std::istream& in);
    static RunConfig parse_file(const std::string& path);
};

}  // namespace repayrisk::config
