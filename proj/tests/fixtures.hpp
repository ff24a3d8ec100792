#pragma once

#include "gillab/gillab.hpp"

#include <memory>

namespace fixture {

inline std::shared_ptr<const gillab::CantorFamily> family(int level = 2, int budget = 6)
{
    static std::map<std::pair<int, int>, std::shared_ptr<const gillab::CantorFamily>> cache;
    auto& slot = cache[{level, budget}];
    if (!slot) slot = std::make_shared<const gillab::CantorFamily>(gillab::build_family(level, budget));
    return slot;
}

inline gillab::SetValuedMap zero(int budget = 6) { return gillab::make_map(gillab::BaseMode::Zero, family(2, budget)); }
inline gillab::SetValuedMap tent(int budget = 6) { return gillab::make_map(gillab::BaseMode::Tent, family(2, budget)); }

}  // namespace fixture
