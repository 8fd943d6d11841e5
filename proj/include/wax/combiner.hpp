#pragma once

#include <string>
#include <vector>

#include "wax/dims.hpp"
#include "wax/rational.hpp"
#include "wax/types.hpp"

namespace wax {

// Sparse panel-level combining structures.  All of them keep the top T_P x T_P
// block equal to the identity; they differ in the bottom block A_B:
//   Identity: no bottom block (T_P = M_P), centralized corner case.
//   Sum:      single all-ones column (T_P = 1).
//   Prop3:    [1 | 0_J | Q1 horizontal copies of I_Phi], needs T_P-1 >= Phi.
//   Prop4:    Q2 stacked blocks [alpha_i * 1 | I_(T_P-1)], last cropped to Pi rows.
//   Prop5:    [1 | vertical copies of I_J cropped to Phi | Q1 copies of I_Phi].
//   General:  staircase tiling of the Phi x (T_P-1) region driven by the
//             Euclidean quotients of (T_P-1, Phi); degenerates to Prop3/Prop5.
//   Custom:   anything else (transformed, permuted, or loaded from file).
enum class Structure { Identity, Sum, Prop3, Prop4, Prop5, General, Custom };

std::string to_string(Structure s);
Structure structure_from_string(const std::string& name);

struct CombiningModule {
  Mat a_tilde;                // M_P x T_P, exact small integers unless Custom
  Structure structure = Structure::Custom;
  std::vector<Cplx> alphas;   // first-column parameters where the structure has them
  int lift = 1;               // L of the Kronecker lift

  int mp() const { return static_cast<int>(a_tilde.rows()); }
  int tp() const { return static_cast<int>(a_tilde.cols()); }
};

// Structure-specific integer parameters (-1 where a value is undefined).
struct QValues {
  int Q1 = -1;
  int Q2 = -1;
  int J = -1;
  int Pi = -1;
};

QValues q_values(int m_p, int t_p, Structure s);

CombiningModule build_structure(int m_p, int t_p, Structure s,
                                const std::vector<Cplx>& alphas = {}, int lift = 1);
CombiningModule build_structure(const SystemDims& dims, Structure s,
                                const std::vector<Cplx>& alphas = {});

// A = A_tilde (x) I_L with L = cm.lift.
Mat kron_lift(const CombiningModule& cm);

// Right-multiplication by an invertible T_P x T_P matrix; the result is the
// same module up to a change of basis of the CPU inputs.
CombiningModule apply_theta(const CombiningModule& cm, const Mat& theta,
                            const NumericPolicy& policy = {});

// Row relabeling: result row i = cm row perm[i] (0-based).
CombiningModule apply_permutation(const CombiningModule& cm, const std::vector<int>& perm);

// Reduced equation matrix B = [(A_B * A_T^{-1})^T ; -I_Phi], M_P x Phi.
// Row i speaks for panel panel_order[i]; panel_order deviates from identity
// only when the top block was singular and rows had to be re-picked.
struct BTilde {
  Mat mat;
  std::vector<int> panel_order;
  bool reindexed = false;

  int phi() const { return static_cast<int>(mat.cols()); }
  int panels() const { return static_cast<int>(mat.rows()); }
  // Coefficient of panel p in equation e.
  Cplx coeff(int p, int e) const { return mat(row_of_panel[p], e); }
  std::vector<int> row_of_panel;  // inverse of panel_order
};

BTilde b_tilde(const CombiningModule& cm, const NumericPolicy& policy = {});

// Continued-fraction expansion of (T_P - 1) / Phi via the Euclidean algorithm.
struct CFExpansion {
  std::vector<long long> quotients;
  Rat value = Rat(0);
};

CFExpansion cf_expansion(int t_p, int m_p);

// Nonzeros of A_B outside its first column: per-panel extra multiply terms.
long long ones_count(const CombiningModule& cm);

// Panels whose filter is unconstrained (all-zero row of B~), 0-based ids.
std::vector<int> free_panels(const BTilde& bt);

}  // namespace wax
