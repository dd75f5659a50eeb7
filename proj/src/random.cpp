#include "falseprop/random.hpp"

#include <algorithm>
#include <string>

namespace fprop {

namespace {

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

GateKind pickKind(std::mt19937_64& rng, bool constants) {
  std::size_t r = below(rng, constants ? 100 : 96);
  if (r < 20) return GateKind::And;
  if (r < 40) return GateKind::Or;
  if (r < 52) return GateKind::Nand;
  if (r < 64) return GateKind::Nor;
  if (r < 76) return GateKind::Xor;
  if (r < 84) return GateKind::Xnor;
  if (r < 92) return GateKind::Not;
  if (r < 96) return GateKind::Buf;
  return r < 98 ? GateKind::Const0 : GateKind::Const1;
}

}  // namespace

Circuit randomCircuit(std::mt19937_64& rng, const RandomCircuitShape& shape, const std::string& name) {
  CircuitBuilder b(name);
  std::vector<VarId> signals;
  for (std::size_t i = 0; i < shape.inputs; ++i) {
    VarId v = b.var("x" + std::to_string(i));
    b.addInput(v);
    signals.push_back(v);
  }
  std::vector<VarId> states;
  for (std::size_t i = 0; i < shape.latches; ++i) {
    VarId v = b.var("s" + std::to_string(i));
    states.push_back(v);
    signals.push_back(v);
  }
  std::vector<VarId> gateOuts;
  std::vector<std::size_t> fanout;
  for (std::size_t g = 0; g < shape.gates; ++g) {
    GateKind k = pickKind(rng, shape.constants);
    if (signals.empty()) k = rng() % 2 ? GateKind::Const1 : GateKind::Const0;
    std::size_t width = 0;
    switch (arityOf(k)) {
      case Arity::Nullary:
        break;
      case Arity::Unary:
        width = 1;
        break;
      case Arity::Nary:
        width = below(rng, 5) == 0 ? 3 : 2;
        break;
    }
    width = std::min(width, signals.size());
    if (width == 1 && arityOf(k) == Arity::Nary) k = GateKind::Not;
    std::vector<VarId> fanin;
    while (fanin.size() < width) {
      // Bias towards recent signals so circuits get some depth.
      std::size_t span = std::min<std::size_t>(signals.size(), shape.inputs + shape.latches + 4);
      std::size_t pick = below(rng, 2) == 0 ? signals.size() - 1 - below(rng, span) : below(rng, signals.size());
      VarId v = signals[pick];
      if (std::find(fanin.begin(), fanin.end(), v) == fanin.end()) fanin.push_back(v);
    }
    for (VarId v : fanin) {
      auto it = std::find(gateOuts.begin(), gateOuts.end(), v);
      if (it != gateOuts.end()) ++fanout[static_cast<std::size_t>(it - gateOuts.begin())];
    }
    VarId out = b.var("g" + std::to_string(g));
    b.addGate(k, std::move(fanin), out);
    gateOuts.push_back(out);
    fanout.push_back(0);
    signals.push_back(out);
  }
  for (std::size_t i = 0; i < shape.latches && !gateOuts.empty(); ++i) {
    std::size_t pick = gateOuts.size() - 1 - below(rng, std::min<std::size_t>(gateOuts.size(), 6));
    ++fanout[pick];
    b.addLatch(states[i], gateOuts[pick], static_cast<LatchInit>(below(rng, 3) == 0 ? 1 : 0));
  }
  std::vector<VarId> outs;
  for (std::size_t i = gateOuts.size(); i-- > 0 && outs.size() < shape.maxOutputs;)
    if (fanout[i] == 0) outs.push_back(gateOuts[i]);
  for (std::size_t i = gateOuts.size(); i-- > 0 && outs.size() < std::min<std::size_t>(1, shape.maxOutputs);)
    if (std::find(outs.begin(), outs.end(), gateOuts[i]) == outs.end()) outs.push_back(gateOuts[i]);
  std::sort(outs.begin(), outs.end());
  for (VarId v : outs) b.addOutput(v);
  return std::move(b).build();
}

}  // namespace fprop
