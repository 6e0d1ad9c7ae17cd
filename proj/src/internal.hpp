#pragma once

#include "sg/game.hpp"

namespace sg::detail {

/// One-state backup of both bounds against the given vectors. `arg_lower` is the
/// lowest action index attaining `lower` (the owner's optimum), which is what the
/// improving-action bookkeeping wants on a strict increase.
struct StateBackup {
    double lower;
    double upper;
    std::uint32_t arg_lower;
};

StateBackup backup_state(const StochasticGame& game, const ValueVector& lower,
                         const ValueVector& upper, StateId s);

}  // namespace sg::detail
