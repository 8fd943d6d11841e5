// waxkit: construct sparse combining modules, check decentralization
// trade-offs, and compute/validate WAX decompositions H = W A X.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wax/channel.hpp"
#include "wax/combiner.hpp"
#include "wax/decentral.hpp"
#include "wax/dims.hpp"
#include "wax/errors.hpp"
#include "wax/manifest.hpp"
#include "wax/matrix_io.hpp"
#include "wax/solver.hpp"
#include "wax/tradeoff.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;       // usage / IO / internal
constexpr int kExitInfeasible = 2;  // meaningful negative result

std::uint64_t env_seed_or(std::uint64_t fallback) {
  if (const char* e = std::getenv("WAXKIT_SEED")) {
    try {
      return std::stoull(e);
    } catch (const std::exception&) {
      throw wax::IoError("WAXKIT_SEED is not an unsigned integer");
    }
  }
  return fallback;
}

std::vector<wax::Cplx> parse_alphas(const std::string& csv) {
  std::vector<wax::Cplx> out;
  std::string tok;
  std::istringstream ss(csv);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(wax::parse_complex(tok));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::string tok;
  std::istringstream ss(csv);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

const char* status_name(wax::SolveStatus s) {
  switch (s) {
    case wax::SolveStatus::Feasible: return "feasible";
    case wax::SolveStatus::Infeasible: return "infeasible";
    case wax::SolveStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw wax::IoError("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

struct ManifestSink {
  std::string path;
  std::vector<std::string> outputs;
  void note(const std::string& out) { outputs.push_back(out); }
  void finish(const std::string& subcommand, const json& params) const {
    if (!path.empty()) wax::write_manifest(path, subcommand, params, outputs);
  }
};

// ---- construct ----

struct ConstructArgs {
  int mp = 0, tp = 0, lift = 1;
  std::string structure, alphas, out, manifest;
};

int run_construct(const ConstructArgs& a) {
  const wax::Structure s = wax::structure_from_string(a.structure);
  const wax::CombiningModule cm =
      wax::build_structure(a.mp, a.tp, s, parse_alphas(a.alphas), a.lift);
  wax::write_matrix(a.out, wax::kron_lift(cm));

  ManifestSink sink{a.manifest, {}};
  sink.note(a.out);
  sink.finish("construct", json{{"M_P", a.mp},
                                {"T_P", a.tp},
                                {"structure", a.structure},
                                {"alphas", a.alphas},
                                {"lift", a.lift},
                                {"out", a.out}});
  return kExitOk;
}

// ---- tradeoff ----

struct TradeoffArgs {
  int M = 0, K = 0;
  std::string structure, grid, out, manifest;
  bool no_confirm = false, serial = false;
  int seeds = 3;
  std::uint64_t seed_base = 1;
};

int run_tradeoff(const TradeoffArgs& a) {
  const wax::Structure s = wax::structure_from_string(a.structure);
  const std::vector<int> grid =
      a.grid.empty() ? wax::default_L_grid(a.M, a.K) : parse_int_list(a.grid);

  wax::SweepOptions opt;
  opt.confirm_borderline = !a.no_confirm;
  opt.confirm_seeds = a.seeds;
  opt.seed_base = env_seed_or(a.seed_base);
  opt.parallel = !a.serial;
  const std::vector<wax::SweepPoint> pts = wax::sweep(a.M, a.K, s, grid, opt);

  std::ofstream f(a.out);
  if (!f) throw wax::IoError("cannot open '" + a.out + "' for writing");
  f << "L,T,structure,bound_kind,threshold,confirmed\n";
  for (const wax::SweepPoint& p : pts) {
    f << p.L << ',' << p.T << ',' << wax::to_string(p.structure) << ',';
    if (p.admissible) {
      f << wax::to_string(p.bound_kind) << ',' << wax::rat_str(p.threshold) << ',';
    } else {
      f << "none,none,";
    }
    f << (p.confirmed < 0 ? "unchecked" : (p.confirmed ? "yes" : "no")) << '\n';
  }
  f.close();

  ManifestSink sink{a.manifest, {}};
  sink.note(a.out);
  sink.finish("tradeoff", json{{"M", a.M},
                               {"K", a.K},
                               {"structure", a.structure},
                               {"grid", a.grid},
                               {"confirm", !a.no_confirm},
                               {"seeds", a.seeds},
                               {"seed_base", opt.seed_base},
                               {"out", a.out}});
  return kExitOk;
}

// ---- shared solve setup for decompose / losscheck ----

struct SolveArgs {
  std::string dims_cfg, structure, a_file, h_file, alphas;
  std::optional<std::uint64_t> seed;
  std::string out, w_out, x_out, manifest;
};

struct SolveSetup {
  wax::SystemDims dims;
  wax::Channel ch;
  wax::Mat A;  // full lifted matrix
  std::optional<wax::CombiningModule> cm;
  std::uint64_t seed = 0;
  double N0 = 1.0;
};

SolveSetup prepare_solve(const SolveArgs& a) {
  if (a.dims_cfg.empty()) throw wax::IoError("--dims config is required");
  const wax::DimsConfig cfg = wax::read_dims_config(a.dims_cfg);
  SolveSetup st;
  st.dims = wax::make_dims(cfg.M, cfg.K, cfg.L, cfg.T_P);
  st.N0 = cfg.N0;
  st.seed = a.seed ? *a.seed : (cfg.has_seed ? cfg.seed : env_seed_or(1));

  if (!a.a_file.empty()) {
    const wax::Mat raw = wax::read_matrix(a.a_file);
    if (raw.rows() == st.dims.M_P && raw.cols() == st.dims.T_P) {
      wax::CombiningModule cm;
      cm.a_tilde = raw;
      cm.structure = wax::Structure::Custom;
      cm.lift = st.dims.L;
      st.cm = cm;
      st.A = wax::kron_lift(cm);
    } else if (raw.rows() == st.dims.M && raw.cols() == st.dims.T) {
      st.A = raw;
    } else {
      throw wax::DimError("--a-file must be M_P x T_P (panel level) or M x T (lifted)");
    }
  } else {
    if (a.structure.empty()) throw wax::IoError("need --structure or --a-file");
    const wax::Structure s = wax::structure_from_string(a.structure);
    st.cm = wax::build_structure(st.dims, s, parse_alphas(a.alphas));
    st.A = wax::kron_lift(*st.cm);
  }

  if (!a.h_file.empty()) {
    st.ch = wax::wrap_channel(wax::read_matrix(a.h_file), st.dims.L, st.N0, st.seed);
    if (st.ch.H.rows() != st.dims.M || st.ch.H.cols() != st.dims.K) {
      throw wax::DimError("--h-file must be M x K");
    }
  } else {
    st.ch = wax::random_channel(st.dims, st.N0, st.seed);
  }
  return st;
}

json factors_json(const wax::SolveOutcome& out) {
  json j;
  j["status"] = status_name(out.status);
  j["feasible"] = (out.status == wax::SolveStatus::Feasible);
  j["residual"] = out.factors.residual;
  j["ls_residual"] = out.ls_residual;
  j["block_ranks"] = out.factors.block_rank;
  j["reference"] = out.factors.reference;
  j["retries"] = out.retries;
  return j;
}

int run_decompose(const SolveArgs& a) {
  const SolveSetup st = prepare_solve(a);
  const wax::SolveOutcome out =
      st.cm ? wax::try_solve_equivalent(*st.cm, st.ch, {}, st.seed)
            : wax::try_solve_generic(st.A, st.ch, {}, st.seed);

  json j = factors_json(out);
  j["seed"] = st.seed;
  j["M"] = st.dims.M;
  j["K"] = st.dims.K;
  j["L"] = st.dims.L;
  j["T_P"] = st.dims.T_P;
  j["mi_raw"] = wax::mutual_info(st.ch.H, st.N0);
  try {
    j["mi_processed"] = wax::mutual_info(st.ch.H, st.N0, out.factors.W, st.A);
    j["mi_gap"] = j["mi_raw"].get<double>() - j["mi_processed"].get<double>();
  } catch (const wax::SingularityError&) {
    j["mi_processed"] = nullptr;
    j["mi_gap"] = nullptr;
  }

  ManifestSink sink{a.manifest, {}};
  if (!a.out.empty()) {
    write_json(a.out, j);
    sink.note(a.out);
  } else {
    std::cout << j.dump(2) << '\n';
  }
  if (out.status == wax::SolveStatus::Feasible) {
    if (!a.w_out.empty()) {
      wax::Mat wfull = wax::Mat::Zero(st.dims.M, st.dims.M);
      for (int m = 0; m < st.dims.M_P; ++m) {
        wfull.block(m * st.dims.L, m * st.dims.L, st.dims.L, st.dims.L) = out.factors.W[m];
      }
      wax::write_matrix(a.w_out, wfull);
      sink.note(a.w_out);
    }
    if (!a.x_out.empty() && out.factors.X.size() > 0) {
      wax::write_matrix(a.x_out, out.factors.X);
      sink.note(a.x_out);
    }
  }
  sink.finish("decompose", json{{"dims", a.dims_cfg},
                                {"structure", a.structure},
                                {"a_file", a.a_file},
                                {"h_file", a.h_file},
                                {"seed", st.seed},
                                {"out", a.out}});
  return out.status == wax::SolveStatus::Feasible ? kExitOk : kExitInfeasible;
}

int run_losscheck(const SolveArgs& a) {
  const SolveSetup st = prepare_solve(a);
  const wax::SolveOutcome out =
      st.cm ? wax::try_solve_equivalent(*st.cm, st.ch, {}, st.seed)
            : wax::try_solve_generic(st.A, st.ch, {}, st.seed);

  const double raw = wax::mutual_info(st.ch.H, st.N0);
  json j;
  j["status"] = status_name(out.status);
  j["feasible"] = (out.status == wax::SolveStatus::Feasible);
  j["seed"] = st.seed;
  j["N0"] = st.N0;
  j["mi_raw"] = raw;
  try {
    const double proc = wax::mutual_info(st.ch.H, st.N0, out.factors.W, st.A);
    j["mi_processed"] = proc;
    j["mi_gap"] = raw - proc;
    j["lossless"] = (raw - proc) < 1e-6;
  } catch (const wax::SingularityError& e) {
    j["mi_processed"] = nullptr;
    j["mi_gap"] = nullptr;
    j["lossless"] = false;
    j["note"] = e.what();
  }

  ManifestSink sink{a.manifest, {}};
  if (!a.out.empty()) {
    write_json(a.out, j);
    sink.note(a.out);
  } else {
    std::cout << j.dump(2) << '\n';
  }
  sink.finish("losscheck", json{{"dims", a.dims_cfg},
                                {"structure", a.structure},
                                {"a_file", a.a_file},
                                {"h_file", a.h_file},
                                {"seed", st.seed},
                                {"out", a.out}});
  return out.status == wax::SolveStatus::Feasible ? kExitOk : kExitInfeasible;
}

// ---- validate ----

struct ValidateArgs {
  int mp = 0, tp = 0, k = 0, l = 0, seeds = 5;
  std::string structure, alphas, out, manifest;
  std::uint64_t seed_base = 1;
  bool serial = false;
};

int run_validate(const ValidateArgs& a) {
  const wax::SystemDims dims = wax::make_panel_dims(a.mp, a.tp, a.k, a.l);
  const wax::Structure s = wax::structure_from_string(a.structure);
  const wax::CombiningModule cm = wax::build_structure(dims, s, parse_alphas(a.alphas));

  const std::uint64_t base = env_seed_or(a.seed_base);
  std::vector<std::uint64_t> seeds(a.seeds);
  for (int i = 0; i < a.seeds; ++i) seeds[i] = base + static_cast<std::uint64_t>(i);

  const wax::ValidationReport vr = wax::validate_A(cm, dims, seeds, {}, !a.serial);
  json j;
  j["valid"] = vr.valid;
  j["indeterminate"] = vr.indeterminate;
  j["structure"] = a.structure;
  j["M_P"] = a.mp;
  j["T_P"] = a.tp;
  j["K"] = a.k;
  j["L"] = a.l;
  j["seeds"] = json::array();
  for (const wax::SeedOutcome& so : vr.seeds) {
    j["seeds"].push_back({{"seed", so.seed},
                          {"status", status_name(so.status)},
                          {"residual", so.residual},
                          {"ls_residual", so.ls_residual},
                          {"redrawn", so.redrawn}});
  }

  ManifestSink sink{a.manifest, {}};
  if (!a.out.empty()) {
    write_json(a.out, j);
    sink.note(a.out);
  } else {
    std::cout << j.dump(2) << '\n';
  }
  sink.finish("validate", json{{"structure", a.structure},
                               {"M_P", a.mp},
                               {"T_P", a.tp},
                               {"K", a.k},
                               {"L", a.l},
                               {"seeds", a.seeds},
                               {"seed_base", base},
                               {"out", a.out}});
  return vr.valid ? kExitOk : kExitInfeasible;
}

// ---- simulate ----

struct SimulateArgs {
  int mp = 0, tp = 0, k = 0, l = 0;
  std::string structure, alphas, out, manifest;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& a) {
  const wax::SystemDims dims = wax::make_panel_dims(a.mp, a.tp, a.k, a.l);
  const wax::Structure s = wax::structure_from_string(a.structure);
  const wax::CombiningModule cm = wax::build_structure(dims, s, parse_alphas(a.alphas));
  const std::uint64_t seed = a.seed ? *a.seed : env_seed_or(1);

  const wax::TreeTopology topo = wax::build_topology(cm);
  const wax::Channel ch = wax::random_channel(dims, 1.0, seed);
  const wax::TrainingResult tr = wax::run_training(topo, cm, ch, {}, seed);
  const wax::Accounting acc = wax::accounting(tr.log, dims);
  const std::vector<std::string> violations = wax::check_log(topo, dims, tr.log);

  json j;
  j["feasible"] = tr.feasible;
  j["residual"] = tr.factors.residual;
  j["seed"] = seed;
  j["topology"] = {{"reference", topo.reference},
                   {"n1", topo.n1},
                   {"n2", topo.n2},
                   {"free_panels", topo.free_panels}};
  j["topology"]["groups"] = json::array();
  for (const wax::PanelGroup& g : topo.groups) {
    j["topology"]["groups"].push_back(
        {{"processing", g.processing}, {"passive", g.passive}, {"equations", g.equations}});
  }
  j["groups"] = json::array();
  for (const wax::GroupResult& gr : tr.groups) {
    j["groups"].push_back({{"group", gr.group},
                           {"status", status_name(gr.status)},
                           {"rel_residual", gr.rel_residual}});
  }
  j["messages"] = {{"reference_csi", {{"count", acc.reference_csi_msgs},
                                      {"scalars", acc.reference_csi_scalars}}},
                   {"local_csi", {{"count", acc.local_csi_msgs},
                                  {"scalars", acc.local_csi_scalars}}},
                   {"filter", {{"count", acc.filter_msgs}, {"scalars", acc.filter_scalars}}}};
  j["peak_csi_blocks"] = acc.peak_csi_blocks;
  j["peak_csi_scalars"] = acc.peak_csi_scalars;
  j["centralized_csi_scalars"] = acc.centralized_csi_scalars;
  j["log_violations"] = violations;

  ManifestSink sink{a.manifest, {}};
  if (!a.out.empty()) {
    write_json(a.out, j);
    sink.note(a.out);
  } else {
    std::cout << j.dump(2) << '\n';
  }
  sink.finish("simulate", json{{"structure", a.structure},
                               {"M_P", a.mp},
                               {"T_P", a.tp},
                               {"K", a.k},
                               {"L", a.l},
                               {"seed", seed},
                               {"out", a.out}});
  return tr.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combining-module construction and WAX decomposition toolkit"};
  app.set_version_flag("--version", std::string(wax::kToolName) + " " + wax::kToolVersion);
  app.require_subcommand(1);

  ConstructArgs ca;
  CLI::App* construct = app.add_subcommand("construct", "emit a combining matrix");
  construct->add_option("--mp", ca.mp, "panel count M_P")->required();
  construct->add_option("--tp", ca.tp, "module outputs T_P")->required();
  construct->add_option("--structure", ca.structure, "identity|sum|prop3|prop4|prop5|general")
      ->required();
  construct->add_option("--alphas", ca.alphas, "comma-separated first-column coefficients");
  construct->add_option("--lift", ca.lift, "Kronecker lift factor L (default 1)");
  construct->add_option("--out", ca.out, "output matrix file")->required();
  construct->add_option("--manifest", ca.manifest, "write a run manifest");

  TradeoffArgs ta;
  CLI::App* tradeoff = app.add_subcommand("tradeoff", "sweep the L vs T trade-off");
  tradeoff->add_option("--m", ta.M, "total antennas M")->required();
  tradeoff->add_option("--k", ta.K, "users K")->required();
  tradeoff->add_option("--structure", ta.structure, "structure to sweep")->required();
  tradeoff->add_option("--grid", ta.grid, "comma-separated L grid (default: divisors of M up to K)");
  tradeoff->add_flag("--no-confirm", ta.no_confirm, "skip Monte-Carlo confirmation");
  tradeoff->add_option("--seeds", ta.seeds, "confirmation seeds per point");
  tradeoff->add_option("--seed", ta.seed_base, "confirmation seed base");
  tradeoff->add_flag("--serial", ta.serial, "disable the parallel grid loop");
  tradeoff->add_option("--out", ta.out, "output CSV")->required();
  tradeoff->add_option("--manifest", ta.manifest, "write a run manifest");

  SolveArgs da;
  CLI::App* decompose = app.add_subcommand("decompose", "factor H = W A X for one channel");
  decompose->add_option("--dims", da.dims_cfg, "JSON config with M,K,L,T_P[,N0,seed]")->required();
  decompose->add_option("--structure", da.structure, "built-in structure");
  decompose->add_option("--alphas", da.alphas, "structure coefficients");
  decompose->add_option("--a-file", da.a_file, "combining matrix file (panel level or lifted)");
  decompose->add_option("--h-file", da.h_file, "channel matrix file (default: random)");
  std::uint64_t dseed = 0;
  CLI::Option* dseed_opt = decompose->add_option("--seed", dseed, "channel seed");
  decompose->add_option("--out", da.out, "JSON result file (default: stdout)");
  decompose->add_option("--w-out", da.w_out, "write the block-diagonal W");
  decompose->add_option("--x-out", da.x_out, "write X");
  decompose->add_option("--manifest", da.manifest, "write a run manifest");

  SolveArgs la;
  CLI::App* losscheck = app.add_subcommand("losscheck", "compare raw vs processed mutual information");
  losscheck->add_option("--dims", la.dims_cfg, "JSON config with M,K,L,T_P[,N0,seed]")->required();
  losscheck->add_option("--structure", la.structure, "built-in structure");
  losscheck->add_option("--alphas", la.alphas, "structure coefficients");
  losscheck->add_option("--a-file", la.a_file, "combining matrix file");
  losscheck->add_option("--h-file", la.h_file, "channel matrix file");
  std::uint64_t lseed = 0;
  CLI::Option* lseed_opt = losscheck->add_option("--seed", lseed, "channel seed");
  losscheck->add_option("--out", la.out, "JSON result file (default: stdout)");
  losscheck->add_option("--manifest", la.manifest, "write a run manifest");

  ValidateArgs va;
  CLI::App* validate = app.add_subcommand("validate", "Monte-Carlo validity of a structure");
  validate->add_option("--structure", va.structure, "structure")->required();
  validate->add_option("--mp", va.mp, "panel count M_P")->required();
  validate->add_option("--tp", va.tp, "module outputs T_P")->required();
  validate->add_option("--k", va.k, "users K")->required();
  validate->add_option("--l", va.l, "panel size L")->required();
  validate->add_option("--alphas", va.alphas, "structure coefficients");
  validate->add_option("--seeds", va.seeds, "number of seeds (default 5)");
  validate->add_option("--seed", va.seed_base, "seed base (default 1)");
  validate->add_flag("--serial", va.serial, "disable the parallel seed loop");
  validate->add_option("--out", va.out, "JSON result file (default: stdout)");
  validate->add_option("--manifest", va.manifest, "write a run manifest");

  SimulateArgs sa;
  CLI::App* simulate = app.add_subcommand("simulate", "decentralized filter training run");
  simulate->add_option("--structure", sa.structure, "identity|sum|prop3|prop4|prop5")->required();
  simulate->add_option("--mp", sa.mp, "panel count M_P")->required();
  simulate->add_option("--tp", sa.tp, "module outputs T_P")->required();
  simulate->add_option("--k", sa.k, "users K")->required();
  simulate->add_option("--l", sa.l, "panel size L")->required();
  simulate->add_option("--alphas", sa.alphas, "structure coefficients");
  std::uint64_t sseed = 0;
  CLI::Option* sseed_opt = simulate->add_option("--seed", sseed, "channel seed");
  simulate->add_option("--out", sa.out, "JSON report file (default: stdout)");
  simulate->add_option("--manifest", sa.manifest, "write a run manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*construct) return run_construct(ca);
    if (*tradeoff) return run_tradeoff(ta);
    if (*decompose) {
      if (dseed_opt->count()) da.seed = dseed;
      return run_decompose(da);
    }
    if (*losscheck) {
      if (lseed_opt->count()) la.seed = lseed;
      return run_losscheck(la);
    }
    if (*validate) return run_validate(va);
    if (*simulate) {
      if (sseed_opt->count()) sa.seed = sseed;
      return run_simulate(sa);
    }
  } catch (const wax::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const wax::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
