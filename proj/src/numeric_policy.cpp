#include "rodeo/numeric_policy.hpp"

namespace rodeo {

namespace {
NumericPolicy g_policy = NumericPolicy::defaults();
}

const NumericPolicy& numeric_policy() { return g_policy; }

void set_numeric_policy(const NumericPolicy& p) { g_policy = p; }

}  // namespace rodeo
