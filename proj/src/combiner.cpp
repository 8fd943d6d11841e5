#include "wax/combiner.hpp"

#include <algorithm>
#include <Eigen/LU>
#include <numeric>
#include <set>

#include "wax/errors.hpp"
#include "wax/linalg.hpp"

namespace wax {

namespace {

// Euclidean staircase tiling of a rows x cols 0/1 region.  Horizontal
// identity copies go to the right end, vertical copies to the top, so the
// output lines up with the golden reference patterns (and degenerates to the
// Prop3/Prop5 layouts when the quotient sequence is short).
void fill_staircase(IMat& r, int r0, int r1, int c0, int c1) {
  const int a = r1 - r0;
  const int b = c1 - c0;
  if (a == 0 || b == 0) return;
  if (b >= a) {
    const int q = b / a;
    for (int t = 1; t <= q; ++t) {
      const int base = c1 - t * a;
      for (int i = 0; i < a; ++i) r(r0 + i, base + i) = 1;
    }
    fill_staircase(r, r0, r1, c0, c1 - q * a);
  } else {
    const int q = a / b;
    for (int t = 0; t < q; ++t) {
      const int base = r0 + t * b;
      for (int i = 0; i < b; ++i) r(base + i, c0 + i) = 1;
    }
    fill_staircase(r, r0 + q * b, r1, c0, c1);
  }
}

std::vector<Cplx> default_alphas(int n) {
  std::vector<Cplx> a(n);
  for (int i = 0; i < n; ++i) a[i] = Cplx(i + 1, 0.0);
  return a;
}

std::vector<Cplx> pick_alphas(const std::vector<Cplx>& supplied, int need) {
  std::vector<Cplx> a = supplied.empty() ? default_alphas(need) : supplied;
  if (static_cast<int>(a.size()) != need) {
    throw AlphaError("expected " + std::to_string(need) + " alpha coefficients, got " +
                     std::to_string(a.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Cplx(0.0, 0.0)) throw AlphaError("alpha coefficients must be nonzero");
    for (std::size_t k = i + 1; k < a.size(); ++k) {
      if (a[i] == a[k]) throw AlphaError("alpha coefficients must be pairwise distinct");
    }
  }
  return a;
}

void reject_alphas(const std::vector<Cplx>& supplied, Structure s) {
  if (!supplied.empty()) {
    throw StructureDomainError("structure " + to_string(s) + " takes no alpha coefficients");
  }
}

CombiningModule assemble(int m_p, int t_p, Structure s, const Mat& ab,
                         std::vector<Cplx> alphas, int lift) {
  CombiningModule cm;
  cm.structure = s;
  cm.alphas = std::move(alphas);
  cm.lift = lift;
  cm.a_tilde = Mat::Zero(m_p, t_p);
  cm.a_tilde.topRows(t_p) = Mat::Identity(t_p, t_p);
  if (ab.rows() > 0) cm.a_tilde.bottomRows(ab.rows()) = ab;
  return cm;
}

}  // namespace

std::string to_string(Structure s) {
  switch (s) {
    case Structure::Identity: return "identity";
    case Structure::Sum: return "sum";
    case Structure::Prop3: return "prop3";
    case Structure::Prop4: return "prop4";
    case Structure::Prop5: return "prop5";
    case Structure::General: return "general";
    case Structure::Custom: return "custom";
  }
  return "?";
}

Structure structure_from_string(const std::string& name) {
  if (name == "identity") return Structure::Identity;
  if (name == "sum") return Structure::Sum;
  if (name == "prop3") return Structure::Prop3;
  if (name == "prop4") return Structure::Prop4;
  if (name == "prop5") return Structure::Prop5;
  if (name == "general") return Structure::General;
  if (name == "custom") return Structure::Custom;
  throw StructureDomainError("unknown structure '" + name + "'");
}

QValues q_values(int m_p, int t_p, Structure s) {
  const int phi = m_p - t_p;
  QValues q;
  switch (s) {
    case Structure::Prop3: {
      if (phi < 1) throw StructureDomainError("prop3 parameters need Phi >= 1");
      if (t_p - 1 < phi) throw StructureDomainError("prop3 parameters need T_P - 1 >= Phi");
      q.Q1 = (t_p - 1) / phi;
      q.J = (t_p - 1) - q.Q1 * phi;
      return q;
    }
    case Structure::Prop4: {
      if (phi < 1 || t_p < 2) throw StructureDomainError("prop4 parameters need Phi >= 1, T_P >= 2");
      q.Q2 = (phi + t_p - 2) / (t_p - 1);
      q.Pi = phi - (q.Q2 - 1) * (t_p - 1);
      return q;
    }
    case Structure::Prop5: {
      if (phi < 1) throw StructureDomainError("prop5 parameters need Phi >= 1");
      if (t_p - 1 < phi) throw StructureDomainError("prop5 parameters need T_P - 1 >= Phi");
      q.Q1 = (t_p - 1) / phi;
      q.J = (t_p - 1) - q.Q1 * phi;
      if (q.J < 1) {
        throw StructureDomainError("Phi divides T_P - 1, the hybrid structure is undefined (use prop3)");
      }
      q.Q2 = (phi + q.J - 1) / q.J;
      return q;
    }
    default:
      throw StructureDomainError("Q values are defined for prop3/prop4/prop5 only");
  }
}

CombiningModule build_structure(int m_p, int t_p, Structure s,
                                const std::vector<Cplx>& alphas, int lift) {
  if (m_p <= 0 || t_p <= 0 || t_p > m_p) {
    throw DimError("need 1 <= T_P <= M_P, got T_P=" + std::to_string(t_p) +
                   " M_P=" + std::to_string(m_p));
  }
  if (lift <= 0) throw DimError("lift factor must be positive");
  const int phi = m_p - t_p;

  switch (s) {
    case Structure::Identity: {
      if (t_p != m_p) throw StructureDomainError("identity structure needs T_P = M_P");
      reject_alphas(alphas, s);
      return assemble(m_p, t_p, s, Mat(0, t_p), {}, lift);
    }

    case Structure::Sum: {
      if (t_p != 1) throw StructureDomainError("sum structure needs T_P = 1");
      reject_alphas(alphas, s);
      return assemble(m_p, t_p, s, Mat::Ones(phi, 1), {}, lift);
    }

    case Structure::Prop3: {
      const QValues q = q_values(m_p, t_p, s);
      reject_alphas(alphas, s);
      Mat ab = Mat::Zero(phi, t_p);
      ab.col(0).setOnes();
      for (int c = 0; c < q.Q1; ++c)
        for (int i = 0; i < phi; ++i) ab(i, 1 + q.J + c * phi + i) = 1.0;
      return assemble(m_p, t_p, s, ab, {}, lift);
    }

    case Structure::Prop4: {
      const QValues q = q_values(m_p, t_p, s);
      std::vector<Cplx> al = pick_alphas(alphas, q.Q2);
      Mat ab = Mat::Zero(phi, t_p);
      for (int r = 0; r < phi; ++r) {
        const int block = r / (t_p - 1);
        ab(r, 0) = al[block];
        ab(r, 1 + r % (t_p - 1)) = 1.0;
      }
      return assemble(m_p, t_p, s, ab, std::move(al), lift);
    }

    case Structure::Prop5: {
      const QValues q = q_values(m_p, t_p, s);
      reject_alphas(alphas, s);
      Mat ab = Mat::Zero(phi, t_p);
      ab.col(0).setOnes();
      for (int r = 0; r < phi; ++r) ab(r, 1 + r % q.J) = 1.0;
      for (int c = 0; c < q.Q1; ++c)
        for (int i = 0; i < phi; ++i) ab(i, 1 + q.J + c * phi + i) = 1.0;
      return assemble(m_p, t_p, s, ab, {}, lift);
    }

    case Structure::General: {
      if (t_p == m_p) {
        reject_alphas(alphas, s);
        return assemble(m_p, t_p, s, Mat(0, t_p), {}, lift);
      }
      if (t_p == 1) {
        reject_alphas(alphas, s);
        return assemble(m_p, t_p, s, Mat::Ones(phi, 1), {}, lift);
      }
      IMat region = IMat::Zero(phi, t_p - 1);
      fill_staircase(region, 0, phi, 0, t_p - 1);
      Mat ab = Mat::Zero(phi, t_p);
      for (int r = 0; r < phi; ++r)
        for (int c = 0; c < t_p - 1; ++c)
          if (region(r, c)) ab(r, 1 + c) = 1.0;
      std::vector<Cplx> al;
      if (t_p - 1 >= phi) {
        // High-output regime: every row is already distinguished by the
        // rightmost identity copies, so the first column stays at 1.
        reject_alphas(alphas, s);
        ab.col(0).setOnes();
      } else {
        const int q2 = (phi + t_p - 2) / (t_p - 1);
        al = pick_alphas(alphas, q2);
        for (int r = 0; r < phi; ++r) ab(r, 0) = al[r / (t_p - 1)];
      }
      return assemble(m_p, t_p, s, ab, std::move(al), lift);
    }

    case Structure::Custom:
      throw StructureDomainError("custom modules come from transformations or file input");
  }
  throw StructureDomainError("unhandled structure");
}

CombiningModule build_structure(const SystemDims& dims, Structure s,
                                const std::vector<Cplx>& alphas) {
  return build_structure(dims.M_P, dims.T_P, s, alphas, dims.L);
}

Mat kron_lift(const CombiningModule& cm) {
  return kron(cm.a_tilde, Mat::Identity(cm.lift, cm.lift));
}

CombiningModule apply_theta(const CombiningModule& cm, const Mat& theta,
                            const NumericPolicy& policy) {
  const int t_p = cm.tp();
  if (theta.rows() != t_p || theta.cols() != t_p) {
    throw DimError("theta must be T_P x T_P");
  }
  if (numerical_rank(theta, policy) < t_p) {
    throw SingularThetaError("theta is singular at the working tolerance");
  }
  CombiningModule out;
  out.a_tilde = cm.a_tilde * theta;
  out.structure = Structure::Custom;
  out.lift = cm.lift;
  return out;
}

CombiningModule apply_permutation(const CombiningModule& cm, const std::vector<int>& perm) {
  const int m_p = cm.mp();
  if (static_cast<int>(perm.size()) != m_p) throw DimError("permutation length != M_P");
  std::vector<char> seen(m_p, 0);
  for (int p : perm) {
    if (p < 0 || p >= m_p || seen[p]) throw DimError("not a permutation of 0..M_P-1");
    seen[p] = 1;
  }
  CombiningModule out;
  out.a_tilde = Mat(m_p, cm.tp());
  for (int i = 0; i < m_p; ++i) out.a_tilde.row(i) = cm.a_tilde.row(perm[i]);
  out.structure = Structure::Custom;
  out.lift = cm.lift;
  return out;
}

BTilde b_tilde(const CombiningModule& cm, const NumericPolicy& policy) {
  const int m_p = cm.mp();
  const int t_p = cm.tp();
  const int phi = m_p - t_p;

  BTilde bt;
  bt.panel_order.resize(m_p);
  std::iota(bt.panel_order.begin(), bt.panel_order.end(), 0);
  bt.row_of_panel = bt.panel_order;
  if (phi == 0) {
    bt.mat = Mat(m_p, 0);
    return bt;
  }

  const Mat top = cm.a_tilde.topRows(t_p);
  const bool top_is_identity =
      (top - Mat::Identity(t_p, t_p)).cwiseAbs().maxCoeff() == 0.0;

  std::vector<int> picked;
  if (top_is_identity) {
    picked.resize(t_p);
    std::iota(picked.begin(), picked.end(), 0);
  } else {
    // Greedy in row order: keep each row that grows the numerical rank.
    picked.reserve(t_p);
    Mat stack(t_p, t_p);
    int have = 0;
    for (int r = 0; r < m_p && have < t_p; ++r) {
      stack.row(have) = cm.a_tilde.row(r);
      if (numerical_rank(stack.topRows(have + 1), policy) == have + 1) {
        picked.push_back(r);
        ++have;
      }
    }
    if (have < t_p) {
      throw RankError("combining matrix has rank < T_P; no invertible row block exists");
    }
  }

  std::vector<char> in_top(m_p, 0);
  for (int r : picked) in_top[r] = 1;
  std::vector<int> rest;
  rest.reserve(phi);
  for (int r = 0; r < m_p; ++r)
    if (!in_top[r]) rest.push_back(r);

  Mat at(t_p, t_p), abm(phi, t_p);
  for (int i = 0; i < t_p; ++i) at.row(i) = cm.a_tilde.row(picked[i]);
  for (int i = 0; i < phi; ++i) abm.row(i) = cm.a_tilde.row(rest[i]);

  Mat ztop;  // (A_B A_T^{-1})^T, T_P x Phi
  if (top_is_identity) {
    ztop = abm.transpose();
  } else {
    ztop = at.transpose().partialPivLu().solve(abm.transpose());
  }

  bt.mat = Mat(m_p, phi);
  bt.mat.topRows(t_p) = ztop;
  bt.mat.bottomRows(phi) = -Mat::Identity(phi, phi);

  bt.panel_order.clear();
  bt.panel_order.insert(bt.panel_order.end(), picked.begin(), picked.end());
  bt.panel_order.insert(bt.panel_order.end(), rest.begin(), rest.end());
  bt.row_of_panel.assign(m_p, -1);
  for (int i = 0; i < m_p; ++i) bt.row_of_panel[bt.panel_order[i]] = i;
  for (int i = 0; i < m_p; ++i) {
    if (bt.panel_order[i] != i) {
      bt.reindexed = true;
      break;
    }
  }
  return bt;
}

CFExpansion cf_expansion(int t_p, int m_p) {
  if (t_p < 1 || m_p <= t_p) {
    throw StructureDomainError("continued fraction needs 1 <= T_P < M_P");
  }
  CFExpansion cf;
  long long a = t_p - 1;
  long long b = m_p - t_p;
  if (a == 0) {
    cf.quotients = {0};
    cf.value = Rat(0);
    return cf;
  }
  while (b != 0) {
    cf.quotients.push_back(a / b);
    const long long r = a % b;
    a = b;
    b = r;
  }
  Rat v(cf.quotients.back());
  for (int i = static_cast<int>(cf.quotients.size()) - 2; i >= 0; --i) {
    v = Rat(cf.quotients[i]) + Rat(1) / v;
  }
  cf.value = v;
  return cf;
}

long long ones_count(const CombiningModule& cm) {
  const int phi = cm.mp() - cm.tp();
  if (phi == 0 || cm.tp() < 2) return 0;
  long long n = 0;
  const auto ab = cm.a_tilde.bottomRows(phi);
  for (int r = 0; r < phi; ++r)
    for (int c = 1; c < cm.tp(); ++c)
      if (ab(r, c) != Cplx(0.0, 0.0)) ++n;
  return n;
}

std::vector<int> free_panels(const BTilde& bt) {
  std::vector<int> out;
  const int m_p = bt.panels();
  if (bt.phi() == 0) {
    out.resize(m_p);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  const double tol = pattern_threshold(bt.mat);
  for (int p = 0; p < m_p; ++p) {
    if (bt.mat.row(bt.row_of_panel[p]).cwiseAbs().maxCoeff() <= tol) out.push_back(p);
  }
  return out;
}

}  // namespace wax
