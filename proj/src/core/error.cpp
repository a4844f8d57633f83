#include "egoscript/core/error.h"

#include <algorithm>

namespace egoscript {

bool has_violation(const Violations& v, std::string_view code) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

}  // namespace egoscript
