#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aniso/cover.hpp"
#include "aniso/grid.hpp"
#include "aniso/kernels.hpp"
#include "aniso/maximal.hpp"

namespace aniso {

struct CorpusItem {
  std::string name;
  std::function<double(const Vec&)> fn;
};

// indicator, tent, Gaussian, mean-zero bump difference, near-atom spike
std::vector<CorpusItem> default_corpus(int dim);

struct CheckCase {
  std::string label;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool pass = true;
};

struct RefinementTrace {
  bool checked = false;
  double h = 0.0, constant_h = 0.0;
  double h2 = 0.0, constant_h2 = 0.0;
  double drift = 0.0;  // |c_h - c_h2| / max(|c_h|, |c_h2|)
};

struct VerificationReport {
  std::string check;
  std::string anchor;  // the inequality in plain ASCII
  std::vector<CheckCase> cases;
  double empirical_constant = 0.0;
  bool pass = false;
  RefinementTrace refinement;
  std::vector<std::string> notes;
};

// radial <= nontangential <= 2^N tangential at every node (slack 1e-12).
VerificationReport check_pointwise_chain(const GridFunction& f, const TestFunction& phi,
                                         const AnisotropicCover& cover,
                                         const MaximalConfig& cfg);
// Field-level variant so corrupted fields are detectable (self-test hook).
VerificationReport check_pointwise_chain_fields(const GridFunction& radial,
                                                const GridFunction& nontangential,
                                                const GridFunction& tangential, int N);

// alpha |{field > alpha}| / l1: the level-set constant of a computed field
// (field-level entry point so corrupted fields are detectable).
double weak11_constant_from_field(const GridFunction& field, double f_l1,
                                  const std::vector<double>& alphas);

// alpha |{M_Theta f > alpha}| <= C ||f||_1 over an alpha sweep.
VerificationReport check_weak_1_1(const CorpusItem& item, const GridSpec& grid,
                                  const AnisotropicCover& cover, const MaximalConfig& cfg,
                                  const std::vector<double>& alphas, double budget);

// ||M_Theta f||_p <= C_p ||f||_p for p > 1; drift gate under one refinement.
VerificationReport check_strong_pp(const CorpusItem& item, const GridSpec& grid,
                                   const AnisotropicCover& cover, const MaximalConfig& cfg,
                                   const std::vector<double>& ps);

// level-set and integrated growth of the aperture maximal in the aperture.
VerificationReport check_aperture_growth(const CorpusItem& item, const GridSpec& grid,
                                         const TestFunction& phi,
                                         const AnisotropicCover& cover,
                                         const MaximalConfig& cfg,
                                         const std::vector<std::pair<int, int>>& l_pairs,
                                         const std::vector<double>& lambdas,
                                         double budget);

// ||T^{N(t0,L)} f||_{L^p(B_K)} <= C ||M^{(t0,L)} f||_{L^p(B_K)} uniformly in t0.
VerificationReport check_tangential_vs_nontangential(const CorpusItem& item,
                                                     const GridSpec& grid,
                                                     const TestFunction& phi,
                                                     const AnisotropicCover& cover,
                                                     const MaximalConfig& cfg,
                                                     const std::vector<double>& t0_sweep);

// grand radial (dictionary) against the single-kernel tangential and
// nontangential maximal functions.
VerificationReport check_grand_vs_single(const CorpusItem& item, const GridSpec& grid,
                                         const AnisotropicCover& cover,
                                         const MaximalConfig& cfg, const TestFunction& phi,
                                         const std::vector<TestFunction>& dictionary);

// quasi-norm ratio matrix among radial, nontangential, 2^N tangential and the
// grand radial dictionary lower bound, with a refinement-stability gate.
VerificationReport theorem41_experiment(const std::vector<CorpusItem>& corpus,
                                        const GridSpec& grid, const TestFunction& phi,
                                        const AnisotropicCover& cover,
                                        const MaximalConfig& cfg, double ratio_budget,
                                        double drift_budget);

// M^{(t0,L)} f <= C3 [M_Theta((M^{0(t0,L)} f)^q)]^{1/q} pointwise.
VerificationReport check_mtheta_domination(const CorpusItem& item, const GridSpec& grid,
                                           const TestFunction& phi,
                                           const AnisotropicCover& cover,
                                           const MaximalConfig& cfg);

// M_Theta of the interval indicator against its closed form.
VerificationReport check_hl_closed_form();

// L^p quasi-norm over the centered ball |x| < K.
double lp_norm_on_ball(const GridFunction& f, double p, double k_radius);

}  // namespace aniso
