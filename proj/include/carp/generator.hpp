#pragma once

#include <cstdint>

#include "carp/instance.hpp"

namespace carp {

// Random geometric instance: vertices scattered on a square, a Euclidean
// spanning tree plus short nearest-neighbour edges, costs equal to rounded
// lengths, `tasks` required edges with demands uniform in [1, max(1, Q/3)].
// Same arguments give the same instance. Throws std::invalid_argument when
// the parameters admit no instance.
Instance generate_instance(int vertices, int tasks, Demand capacity, std::uint64_t seed);

}  // namespace carp
