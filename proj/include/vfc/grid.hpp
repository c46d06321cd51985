#pragma once

#include <string>
#include <vector>

namespace vfc {

struct NodeParams {
  std::string id;
  double shed_cost = 0.0;          // $/MWh
  double curtail_cost = 0.0;       // $/MWh
  double wind_capacity_mw = 0.0;   // 0 for nodes without wind farms
};

struct LineParams {
  std::string from;   // originating node o(l)
  std::string to;     // receiving node r(l)
  double susceptance = 0.0;  // p.u.
  double capacity = 0.0;     // MW
};

struct GeneratorParams {
  std::string id;
  std::string node;
  double cost = 0.0;           // marginal $/MWh
  double startup_cost = 0.0;   // $
  double shutdown_cost = 0.0;  // $
  double up_cost = 0.0;        // upward redispatch $/MWh
  double down_cost = 0.0;      // downward redispatch $/MWh
  double p_min = 0.0;          // MW
  double p_max = 0.0;          // MW
  double ramp = 0.0;           // online ramp MW/h
  double startup_ramp = 0.0;   // MW/h
  int min_up = 1;              // h
  int min_down = 1;            // h
  int initial_status = 0;      // pre-horizon commitment; the hourly model
                               // never couples to t=0, kept for completeness
};

struct Grid {
  std::vector<NodeParams> nodes;
  std::vector<LineParams> lines;
  std::vector<GeneratorParams> generators;
  std::string reference;
  double base_mva = 100.0;

  // Resolved indices (filled by finalize()).
  int ref_index = -1;
  std::vector<int> line_from, line_to;     // node indices per line
  std::vector<int> gen_node;               // node index per generator
  std::vector<std::vector<int>> gens_at;   // generator indices per node

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_lines() const { return static_cast<int>(lines.size()); }
  int num_generators() const { return static_cast<int>(generators.size()); }

  int node_index(const std::string& id) const;  // -1 if absent

  // Resolves name references and checks all invariants; throws DataError
  // with the offending field on violation.
  void finalize();
};

}  // namespace vfc
