#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wax/channel.hpp"
#include "wax/combiner.hpp"
#include "wax/dims.hpp"
#include "wax/solver.hpp"

namespace wax {

// Tree interconnect for decentralized filter training: a reference panel
// feeds N1 processing panels, each gathering CSI from its N2 passive panels.
// Groups are the connected components of the block equations, so every filter
// can be computed without any panel holding full CSI.
struct PanelGroup {
  int processing = -1;
  std::vector<int> passive;
  std::vector<int> equations;
};

struct TreeTopology {
  int reference = -1;
  std::vector<PanelGroup> groups;
  std::vector<int> free_panels;
  int n1 = 0;  // number of groups
  int n2 = 0;  // passive panels per group (nominal: largest group)
};

// Defined for the closed-form structures (identity / sum / prop3/4/5); the
// staircase and custom modules have no tree schedule.
TreeTopology build_topology(const CombiningModule& cm, const NumericPolicy& policy = {});

enum class Payload { ReferenceCsi, LocalCsi, Filter };

struct Message {
  int phase = 0;  // 1 = CSI gathering, 3 = filter distribution
  int from = -1;
  int to = -1;
  Payload kind = Payload::LocalCsi;
  long long scalars = 0;  // complex entries carried
};

struct MessageLog {
  std::vector<Message> messages;
  int phases = 3;
};

struct GroupResult {
  int group = -1;
  SolveStatus status = SolveStatus::Infeasible;
  double rel_residual = 0.0;
};

struct TrainingResult {
  WaxFactors factors;
  MessageLog log;
  std::vector<GroupResult> groups;
  bool feasible = false;
};

// Runs the three-phase schedule (gather CSI, solve per group, push filters)
// and assembles the global factorization from the per-group solves.
TrainingResult run_training(const TreeTopology& topo, const CombiningModule& cm,
                            const Channel& ch, const NumericPolicy& policy = {},
                            std::uint64_t seed = 0);

struct Accounting {
  long long reference_csi_scalars = 0;
  long long local_csi_scalars = 0;
  long long filter_scalars = 0;
  int reference_csi_msgs = 0;
  int local_csi_msgs = 0;
  int filter_msgs = 0;
  int peak_csi_blocks = 0;           // distinct L x K blocks held by one panel
  long long peak_csi_scalars = 0;
  long long centralized_csi_scalars = 0;  // M * K for comparison
};

Accounting accounting(const MessageLog& log, const SystemDims& dims);

// Structural audit of a log against a topology; returns human-readable
// violations (empty = consistent).
std::vector<std::string> check_log(const TreeTopology& topo, const SystemDims& dims,
                                   const MessageLog& log);

}  // namespace wax
