#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "aniso/convolution.hpp"
#include "aniso/cover.hpp"
#include "aniso/grid.hpp"
#include "aniso/kernels.hpp"

namespace aniso {

enum class MaximalKind {
  radial,
  nontangential,
  tangential,
  truncated_radial,
  truncated_nontangential,
  truncated_tangential,
  aperture,
};

const char* kind_name(MaximalKind k);

struct MaximalConfig {
  double t_min = -6.0, t_max = 8.0, t_step = 0.1;
  int N = 2;        // tangential exponent
  int Ntilde = 4;   // paired weight power
  double L = 0.0;   // decay level for the truncated variants
  double t0 = -2.0; // truncation level (< 0)
  int aperture_l = 0;
  double p = 1.0;   // Lebesgue exponent for norms
  double q = 0.5;   // 0 < q < p probe exponent
  int Np = 0, Ntilde_p = 0;  // grand-maximal orders; 0 = minimal per cover
  bool include_center = true;  // nontangential always includes y = x

  void validate() const;
  std::vector<double> t_grid() const;  // t_min + k t_step up to t_max
};

struct Witness {
  std::int64_t x_flat = -1;
  double t = 0.0;
  std::int64_t y_flat = -1;
  double value = 0.0;
};

struct MaximalField {
  std::string kind;
  GridFunction values;
  std::vector<std::string> flags;
  Witness global_max;
};

// One sweep over the shared t-grid serving several maximal kinds for a batch
// of inputs on a common grid. Results are indexed [f][kind].
std::vector<std::map<MaximalKind, MaximalField>> compute_maximal_fields(
    const std::vector<const GridFunction*>& fs, const TestFunction& phi,
    const AnisotropicCover& cover, const MaximalConfig& cfg,
    const std::vector<MaximalKind>& kinds);

MaximalField radial_maximal(const GridFunction& f, const TestFunction& phi,
                            const AnisotropicCover& cover, const MaximalConfig& cfg);
MaximalField nontangential_maximal(const GridFunction& f, const TestFunction& phi,
                                   const AnisotropicCover& cover, const MaximalConfig& cfg);
MaximalField tangential_maximal(const GridFunction& f, const TestFunction& phi,
                                const AnisotropicCover& cover, const MaximalConfig& cfg);
MaximalField truncated_radial(const GridFunction& f, const TestFunction& phi,
                              const AnisotropicCover& cover, const MaximalConfig& cfg);
MaximalField truncated_nontangential(const GridFunction& f, const TestFunction& phi,
                                     const AnisotropicCover& cover, const MaximalConfig& cfg);
MaximalField truncated_tangential(const GridFunction& f, const TestFunction& phi,
                                  const AnisotropicCover& cover, const MaximalConfig& cfg);
// Aperture maximal of the truncated-decayed field over theta(x, t - l J).
MaximalField aperture_maximal(const GridFunction& f, const TestFunction& phi,
                              const AnisotropicCover& cover, const MaximalConfig& cfg);

// Aperture maximal of a caller-supplied base field F_x(y, t).
using BaseField = std::function<double(const Vec& x, const Vec& y, double t)>;
MaximalField aperture_maximal_custom(const GridSpec& grid, const AnisotropicCover& cover,
                                     const MaximalConfig& cfg, const BaseField& field);

// Hardy-Littlewood-type maximal operator: sup over scales of the average of
// |f| over theta(x, t), cell-weighted with 4^n boundary sub-sampling.
MaximalField hl_maximal(const GridFunction& f, const AnisotropicCover& cover,
                        const MaximalConfig& cfg);

// Finite-dictionary lower bounds for the grand maximal functions. Kernels
// must be pre-normalized to seminorm <= 1 (see default_dictionary).
MaximalField grand_radial_maximal(const GridFunction& f, const AnisotropicCover& cover,
                                  const MaximalConfig& cfg,
                                  const std::vector<TestFunction>& dictionary);
MaximalField grand_nontangential_maximal(const GridFunction& f,
                                         const AnisotropicCover& cover,
                                         const MaximalConfig& cfg,
                                         const std::vector<TestFunction>& dictionary);

// Gaussian, two Hermite-Gaussians and a bump, each scaled to seminorm 1.
std::vector<TestFunction> default_dictionary(int dim, const SeminormSpec& spec);

// (Np, Ntilde_p) for the cover at exponent p: configured values if set,
// otherwise the minimal admissible integers.
SeminormSpec grand_orders(const AnisotropicCover& cover, const MaximalConfig& cfg);

}  // namespace aniso
