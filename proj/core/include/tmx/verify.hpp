#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tmx {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Run the laboratory's verification criteria (closed forms, identities and
/// desk-scale experiment contracts). `only` filters by id; `quick` restricts
/// to the sub-minute checks {1,2,5,10,12}. Progress lines go to `log` when
/// given.
std::vector<CheckResult> run_verification(const std::vector<int>& only = {}, bool quick = false,
                                          std::ostream* log = nullptr);

std::string format_check_line(const CheckResult& c);

}  // namespace tmx
