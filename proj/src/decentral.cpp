#include "wax/decentral.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "wax/errors.hpp"
#include "wax/linalg.hpp"

namespace wax {

namespace {

int pick_processing(const BTilde& bt, const EquationComponent& comp) {
  // The panel serving the most equations of its component does the solving;
  // for the closed-form structures that is the shared top panel.
  const double tol = pattern_threshold(bt.mat);
  int best = comp.panels.front();
  int best_count = -1;
  for (int p : comp.panels) {
    int c = 0;
    for (int e : comp.equations) {
      if (std::abs(bt.coeff(p, e)) > tol) ++c;
    }
    if (c > best_count) {
      best = p;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

TreeTopology build_topology(const CombiningModule& cm, const NumericPolicy& policy) {
  switch (cm.structure) {
    case Structure::Identity:
    case Structure::Sum:
    case Structure::Prop3:
    case Structure::Prop4:
    case Structure::Prop5:
      break;
    default:
      throw StructureDomainError("no decentralized schedule for structure " +
                                 to_string(cm.structure));
  }
  const BTilde bt = b_tilde(cm, policy);
  const EquationSystem es = equation_system(bt);

  TreeTopology topo;
  topo.reference = es.reference;
  topo.free_panels = es.free;
  for (std::size_t ci = 0; ci < es.components.size(); ++ci) {
    const EquationComponent& comp = es.components[ci];
    PanelGroup g;
    g.processing = pick_processing(bt, comp);
    for (int p : comp.panels) {
      if (p != g.processing) g.passive.push_back(p);
    }
    g.equations = comp.equations;
    topo.groups.push_back(std::move(g));
  }
  topo.n1 = static_cast<int>(topo.groups.size());
  for (const PanelGroup& g : topo.groups) {
    topo.n2 = std::max(topo.n2, static_cast<int>(g.passive.size()));
  }
  return topo;
}

TrainingResult run_training(const TreeTopology& topo, const CombiningModule& cm,
                            const Channel& ch, const NumericPolicy& policy,
                            std::uint64_t seed) {
  const int m_p = cm.mp();
  const int L = ch.L;
  const int K = static_cast<int>(ch.H.cols());
  if (ch.panels() != m_p || ch.L != cm.lift) throw DimError("channel does not match module");

  const BTilde bt = b_tilde(cm, policy);
  const double tol = pattern_threshold(bt.mat);

  TrainingResult tr;
  std::vector<Mat> G(m_p, Mat::Identity(L, L));
  bool all_feasible = true;

  // Phase 1: every processing panel gathers the reference block (when it
  // appears in its equations) and its passive panels' blocks.
  for (std::size_t gi = 0; gi < topo.groups.size(); ++gi) {
    const PanelGroup& g = topo.groups[gi];
    bool needs_ref = false;
    for (int e : g.equations) {
      if (topo.reference >= 0 && std::abs(bt.coeff(topo.reference, e)) > tol) needs_ref = true;
    }
    if (needs_ref) {
      tr.log.messages.push_back(
          {1, topo.reference, g.processing, Payload::ReferenceCsi,
           static_cast<long long>(L) * K});
    }
    for (int p : g.passive) {
      tr.log.messages.push_back(
          {1, p, g.processing, Payload::LocalCsi, static_cast<long long>(L) * K});
    }
  }

  // Phase 2: local solves, one per group, independent RNG streams.
  for (std::size_t gi = 0; gi < topo.groups.size(); ++gi) {
    const PanelGroup& g = topo.groups[gi];
    EquationComponent comp;
    comp.equations = g.equations;
    comp.panels.push_back(g.processing);
    comp.panels.insert(comp.panels.end(), g.passive.begin(), g.passive.end());
    std::sort(comp.panels.begin(), comp.panels.end());

    Rng rng(derive_seed(seed, 0xdec0 + gi));
    GroupResult res;
    res.group = static_cast<int>(gi);
    try {
      const ComponentSolve cs = solve_component(bt, ch, comp, topo.reference, policy, rng);
      res.status = cs.status;
      res.rel_residual = cs.rel_residual;
      for (std::size_t pi = 0; pi < comp.panels.size(); ++pi) G[comp.panels[pi]] = cs.G[pi];
    } catch (const RankError&) {
      res.status = SolveStatus::Infeasible;
    }
    if (res.status != SolveStatus::Feasible) all_feasible = false;
    tr.groups.push_back(res);
  }

  // Phase 3: computed filters go back to the passive panels.
  for (const PanelGroup& g : topo.groups) {
    for (int p : g.passive) {
      tr.log.messages.push_back(
          {3, g.processing, p, Payload::Filter, static_cast<long long>(L) * L});
    }
  }

  tr.feasible = all_feasible;
  NumericPolicy pol = policy;
  tr.factors.reference = topo.reference;
  tr.factors.W.resize(m_p);
  tr.factors.block_rank.resize(m_p);
  for (int m = 0; m < m_p; ++m) {
    tr.factors.block_rank[m] = numerical_rank(G[m], pol);
    tr.factors.W[m] = (tr.factors.block_rank[m] == L)
                          ? Mat(G[m].partialPivLu().inverse())
                          : Mat::Identity(L, L);
  }
  if (all_feasible) {
    bool top_ok = true;
    for (int i = 0; i < cm.tp(); ++i) {
      if (tr.factors.block_rank[bt.panel_order[i]] < L) top_ok = false;
    }
    if (top_ok) {
      // Same recovery as the centralized path.
      tr.factors.X = recover_X(cm, ch, tr.factors.W, policy);
      tr.factors.residual = global_residual(kron_lift(cm), ch, tr.factors.W, tr.factors.X);
    }
  }
  return tr;
}

Accounting accounting(const MessageLog& log, const SystemDims& dims) {
  Accounting acc;
  acc.centralized_csi_scalars = static_cast<long long>(dims.M) * dims.K;
  std::map<int, std::set<int>> csi_held;  // recipient -> senders of CSI blocks
  for (const Message& m : log.messages) {
    switch (m.kind) {
      case Payload::ReferenceCsi:
        ++acc.reference_csi_msgs;
        acc.reference_csi_scalars += m.scalars;
        csi_held[m.to].insert(m.from);
        break;
      case Payload::LocalCsi:
        ++acc.local_csi_msgs;
        acc.local_csi_scalars += m.scalars;
        csi_held[m.to].insert(m.from);
        break;
      case Payload::Filter:
        ++acc.filter_msgs;
        acc.filter_scalars += m.scalars;
        break;
    }
  }
  for (const auto& [panel, blocks] : csi_held) {
    acc.peak_csi_blocks = std::max(acc.peak_csi_blocks, static_cast<int>(blocks.size()));
  }
  acc.peak_csi_scalars = static_cast<long long>(acc.peak_csi_blocks) * dims.L * dims.K;
  return acc;
}

std::vector<std::string> check_log(const TreeTopology& topo, const SystemDims& dims,
                                   const MessageLog& log) {
  std::vector<std::string> bad;
  const long long csi = static_cast<long long>(dims.L) * dims.K;
  const long long flt = static_cast<long long>(dims.L) * dims.L;

  std::map<std::pair<int, int>, int> local_seen, filter_seen, ref_seen;
  for (const Message& m : log.messages) {
    switch (m.kind) {
      case Payload::ReferenceCsi:
        if (m.phase != 1) bad.push_back("reference CSI outside phase 1");
        if (m.from != topo.reference) bad.push_back("reference CSI not sent by the reference");
        if (m.scalars != csi) bad.push_back("reference CSI payload size mismatch");
        ++ref_seen[{m.from, m.to}];
        break;
      case Payload::LocalCsi:
        if (m.phase != 1) bad.push_back("local CSI outside phase 1");
        if (m.scalars != csi) bad.push_back("local CSI payload size mismatch");
        ++local_seen[{m.from, m.to}];
        break;
      case Payload::Filter:
        if (m.phase != 3) bad.push_back("filter outside phase 3");
        if (m.scalars != flt) bad.push_back("filter payload size mismatch");
        ++filter_seen[{m.from, m.to}];
        break;
    }
  }

  for (const PanelGroup& g : topo.groups) {
    for (int p : g.passive) {
      if (local_seen[{p, g.processing}] != 1) {
        bad.push_back("passive panel " + std::to_string(p) + " CSI not delivered exactly once");
      }
      if (filter_seen[{g.processing, p}] != 1) {
        bad.push_back("filter for panel " + std::to_string(p) + " not delivered exactly once");
      }
    }
  }
  for (const auto& [edge, n] : ref_seen) {
    bool to_processing = false;
    for (const PanelGroup& g : topo.groups) {
      if (g.processing == edge.second) to_processing = true;
    }
    if (!to_processing) bad.push_back("reference CSI sent to a non-processing panel");
    if (n > 1) bad.push_back("duplicate reference CSI on one link");
  }

  // Decentralization cap: nobody may accumulate more than its group plus the
  // reference block.
  const Accounting acc = accounting(log, dims);
  if (acc.peak_csi_blocks > topo.n2 + 1) {
    bad.push_back("a panel holds " + std::to_string(acc.peak_csi_blocks) +
                  " CSI blocks, exceeding N2+1 = " + std::to_string(topo.n2 + 1));
  }
  return bad;
}

}  // namespace wax
