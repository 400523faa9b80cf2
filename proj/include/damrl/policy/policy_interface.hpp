#pragma once

#include "damrl/env/environment.hpp"

namespace damrl::policy {

/// Common contract for every dam-operation policy. Implementations return a
/// discharge within [0, a_max]; `explore` asks stochastic policies to sample
/// rather than act deterministically.
class PolicyInterface {
  public:
    virtual ~PolicyInterface() = default;
    virtual env::Action act(const env::EnvState& state, bool explore) = 0;
};

} // namespace damrl::policy
