#include "vfc/grid.hpp"

#include <set>

#include "vfc/errors.hpp"

namespace vfc {

int Grid::node_index(const std::string& id) const {
  for (int i = 0; i < num_nodes(); ++i)
    if (nodes[i].id == id) return i;
  return -1;
}

void Grid::finalize() {
  if (nodes.empty()) throw DataError("grid: no nodes");
  std::set<std::string> seen;
  for (const NodeParams& n : nodes) {
    if (n.id.empty()) throw DataError("grid: node with empty id");
    if (!seen.insert(n.id).second) throw DataError("grid: duplicate node id '" + n.id + "'");
    if (n.shed_cost < 0.0) throw DataError("grid: node '" + n.id + "': negative shed_cost");
    if (n.curtail_cost < 0.0) throw DataError("grid: node '" + n.id + "': negative curtail_cost");
    if (n.wind_capacity_mw < 0.0) throw DataError("grid: node '" + n.id + "': negative wind capacity");
  }

  ref_index = node_index(reference);
  if (ref_index < 0) throw DataError("grid: reference node '" + reference + "' does not exist");

  line_from.clear();
  line_to.clear();
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const LineParams& ln = lines[l];
    const int o = node_index(ln.from);
    const int r = node_index(ln.to);
    if (o < 0) throw DataError("grid: line " + std::to_string(l) + ": unknown node '" + ln.from + "'");
    if (r < 0) throw DataError("grid: line " + std::to_string(l) + ": unknown node '" + ln.to + "'");
    if (o == r) throw DataError("grid: line " + std::to_string(l) + ": endpoints coincide");
    if (!(ln.susceptance > 0.0)) throw DataError("grid: line " + std::to_string(l) + ": susceptance must be > 0");
    if (!(ln.capacity > 0.0)) throw DataError("grid: line " + std::to_string(l) + ": capacity must be > 0");
    line_from.push_back(o);
    line_to.push_back(r);
  }

  gen_node.clear();
  gens_at.assign(nodes.size(), {});
  std::set<std::string> gen_ids;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const GeneratorParams& gen = generators[g];
    if (gen.id.empty()) throw DataError("grid: generator with empty id");
    if (!gen_ids.insert(gen.id).second) throw DataError("grid: duplicate generator id '" + gen.id + "'");
    const int i = node_index(gen.node);
    if (i < 0) throw DataError("grid: generator '" + gen.id + "': unknown node '" + gen.node + "'");
    if (gen.p_min < 0.0 || gen.p_min > gen.p_max)
      throw DataError("grid: generator '" + gen.id + "': requires 0 <= p_min <= p_max");
    if (gen.ramp < 0.0 || gen.startup_ramp < 0.0)
      throw DataError("grid: generator '" + gen.id + "': negative ramp limit");
    if (gen.min_up < 1 || gen.min_down < 1)
      throw DataError("grid: generator '" + gen.id + "': min up/down times must be >= 1");
    if (gen.cost < 0.0 || gen.startup_cost < 0.0 || gen.shutdown_cost < 0.0 ||
        gen.up_cost < 0.0 || gen.down_cost < 0.0)
      throw DataError("grid: generator '" + gen.id + "': negative cost");
    if (gen.initial_status != 0 && gen.initial_status != 1)
      throw DataError("grid: generator '" + gen.id + "': initial_status must be 0 or 1");
    gen_node.push_back(i);
    gens_at[i].push_back(static_cast<int>(g));
  }
}

}  // namespace vfc
