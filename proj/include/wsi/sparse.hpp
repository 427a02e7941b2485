#pragma once

#include "wsi/grid.hpp"
#include "wsi/kernels.hpp"
#include "wsi/orlicz.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wsi {

// One stopping cube: base carries the disjoint certificate, support is the
// dilated cube the sparse forms run over (27-dilate, 9-dilate for the
// single-operator variant), clipped or wrapped to the domain.
struct SparseEntry {
  Cube base;
  Cube support;
  CellSet cert;
};

struct SparseFamily {
  Geometry geom;
  int dilation = 27;
  std::vector<SparseEntry> entries;
};

std::string sparse_family_to_json(const SparseFamily& s);
SparseFamily sparse_family_from_json(const std::string& text);

// Greedy certificate construction over an arbitrary cube list: smallest cubes
// claim first, each cube claims its still-unclaimed cells. Certificates are
// returned in input order.
struct SparsityResult {
  double eta = 1.0; // min over cubes of |claimed| / |Q|
  std::vector<CellSet> certificates;
};
SparsityResult verify_sparsity(const std::vector<Cube>& cubes);

// checks on the certificates an algorithm stored
struct CertificateCheck {
  bool contained = true;    // cert inside base
  bool disjoint = true;     // pairwise across entries
  double eta_base = 1.0;    // min |cert| / |base|
  double eta_support = 1.0; // min |cert| / |support|
};
CertificateCheck check_certificates(const SparseFamily& s);

// sum over entries of |S| * left(f on S) * right(g on S)
double sparse_form(const SparseFamily& s, const GridFunction& f, const GridFunction& g,
                   const LocalFunctional& left, const LocalFunctional& right);

struct DominationOptions {
  int max_doublings = 20; // D capped at 2^20
};

// Stopping-time family for the composition T1 T2: at each node Q the three
// exceptional sets are thresholded at D * local norms of f over 27Q, D is
// doubled until their union fills at most 2^-(n+2) of Q, children come from
// the CZ decomposition of the exceptional indicator at level 2^-(n+1), and
// Q keeps the complement of its children as certificate. The family does not
// depend on g.
struct CompositionDomination {
  SparseFamily family;
  double d_max = 1.0;
  bool d_capped = false;
  std::vector<double> node_d;
  std::vector<double> exceptional_fraction; // |E|/|Q| at the accepted D
};

CompositionDomination dominate_composition(const KernelOperator& T1, const KernelOperator& T2,
                                           const GridFunction& f,
                                           const DominationOptions& opt = {});

// both sides of the domination |int g T1 T2 f| <= D * (A1 + A2) with
// A1 = sum |S| ||f||_{L(logL)^2,S} <|g|>_S and A2 = sum |S| ||f||_{LlogL,S}
// ||g||_{LlogL,S}
struct FormEvaluation {
  double lhs = 0.0;
  double form1 = 0.0;
  double form2 = 0.0;
  double ratio = 0.0; // lhs / (d_max * (form1 + weighted form2)); 0 when lhs = 0
};
FormEvaluation evaluate_composition(const CompositionDomination& dom, const KernelOperator& T1,
                                    const KernelOperator& T2, const GridFunction& f,
                                    const GridFunction& g);

// Maximal-composition variant: dominates int |g| M[T1 T2 f]. The third
// exceptional set thresholds the local bi-sublinear maximal against
// D q' ||f||_{LlogL,27Q} <|g|>_{q,Q}, so the family depends on g and must not
// be reused for another g. The certified bound here is exact: ratio <= 1 by
// construction.
struct MaximalDomination {
  SparseFamily family;
  double d_max = 1.0;
  bool d_capped = false;
  std::vector<double> node_d;
  std::vector<double> exceptional_fraction;
  double q = 2.0;
  double qprime = 2.0;
  FormEvaluation eval; // lhs = int |g| M T1T2 f, form2 weighted by q'
};

MaximalDomination dominate_maximal_composition(const KernelOperator& T1, const KernelOperator& T2,
                                               const GridFunction& f, const GridFunction& g,
                                               double q, const DominationOptions& opt = {});

// Single-operator variant for V = M_{L(logL)^k} T with 9-dilates: pointwise
// V f(x) <= d_max * sum ||f||_{L(logL)^(k+1),S} chi_S(x) certified by the
// stopping construction.
struct SingleDomination {
  SparseFamily family;
  double d_max = 1.0;
  bool d_capped = false;
  std::vector<double> node_d;
  std::vector<double> exceptional_fraction;
  int k = 0;
  double max_pointwise_c = 0.0; // max over x of Vf / sum ||f|| chi_S, no D
  double ratio = 0.0;           // max_pointwise_c / d_max, certified <= 1
};

SingleDomination sparse_dominate_single(const KernelOperator& T, const GridFunction& f, int k,
                                        const DominationOptions& opt = {});

} // namespace wsi
