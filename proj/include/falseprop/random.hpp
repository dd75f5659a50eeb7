#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "falseprop/netlist.hpp"

namespace fprop {

struct RandomCircuitShape {
  std::size_t inputs = 4;
  std::size_t gates = 10;
  std::size_t maxOutputs = 3;
  std::size_t latches = 0;
  bool constants = true;  ///< allow CONST0/CONST1 gates
};

/// Random well-formed netlist. Only raw engine output feeds the choices
/// (modulo arithmetic), so a seed gives the same circuit on every platform.
Circuit randomCircuit(std::mt19937_64& rng, const RandomCircuitShape& shape, const std::string& name = "rand");

}  // namespace fprop
