#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cscale/config.hpp"
#include "cscale/geometry.hpp"
#include "cscale/maps.hpp"

namespace cscale {

// ------------------------------------------------------------ centering

struct Centering {
  CVec boundary_point;
  CVec direction;  // unit outward direction of the search line
  double offset = 0.0;  // q = p - offset * direction
  cd alpha0 = 1.0;
  AffineMap map;   // A, with A(p) = 0
};

/// Walks from q along `direction` (default: outward normal at q) to the first
/// boundary crossing within `chart_radius`, then builds the centering map.
Centering centering_map(const DefiningFunction& rho, const CVec& q,
                        const std::optional<CVec>& direction = std::nullopt,
                        double chart_radius = 4.0);

/// Unitary R with R v = e0 for a unit vector v.
CMat unitary_to_e0(const CVec& v);

// ------------------------------------------------------------ dilatation

enum class Anisotropy {
  /// Tangential block scaled by lambda0^{-1/2} after Levi normalization;
  /// strongly pseudoconvex points then scale to the Siegel domain.
  LeviNormalized,
  /// Diagonal: coordinates 1..n divided by lambda0^exponent.
  Power,
};

struct DilatationRule {
  Anisotropy kind = Anisotropy::LeviNormalized;
  double exponent = 0.5;
};

struct Dilatation {
  Centering centering;
  cd lambda0 = 1.0;
  AffineMap map;  // Lambda = L o A, Lambda(q) = e0
};

Dilatation pinchuk_dilatation(const DefiningFunction& rho, const CVec& q, const DilatationRule& rule = {},
                              const std::optional<CVec>& direction = std::nullopt);

// ------------------------------------------------------ automorphisms/maps

/// Involutive Moebius automorphism of the unit ball exchanging 0 and a.
HoloMap ball_automorphism(const CVec& a);

/// (w, z) -> ((1 - w)/(1 + w), 2 z/(1 + w)), Siegel domain onto the ball.
HoloMap cayley_siegel_to_ball(int dim = 2);

/// (w, z) -> (s w + i t, s^{1/(2m)} z) on {Re w > |z|^{2m}}.
HoloMap bp_model_automorphisms(int m, double t, double s);

/// z_j -> (z_j - i Im t_j) / Re t_j.
AffineMap corner_dilatation(const CVec& t);

/// [dphi(q)]^{-1} (phi(z) - phi(q)).
HoloMap frankel_scaling(const HoloMap& phi, const CVec& q);

// --------------------------------------------------------------- orbits

struct OrbitSpec {
  std::string domain = "ball";
  CatalogParams params;
  /// ball_mobius: phi_nu = Moebius map sending 0 to (1 - r_nu) p.
  /// bp_dilation: phi_nu = bp_model_automorphisms(m, 0, r_nu) (siegel, bp_model).
  /// identity:    phi_nu = identity.
  std::string family = "ball_mobius";
  CVec base_point;
  CVec accumulation_point;
  /// dyadic: r_nu = 2^-nu; harmonic: r_nu = 1/(nu + 1).
  std::string index_rule = "dyadic";
  DilatationRule rule;
  /// Index from which |q^nu - p| is non-increasing.
  int monotone_from = 1;

  static OrbitSpec from_config(const KeyValueConfig& cfg);
  static const std::vector<std::string>& config_keys();
  DefiningFunction domain_function() const;
  double rate(int nu) const;
  HoloMap automorphism(int nu) const;
  CVec point(int nu) const;
  /// Checks q^nu in the domain and the monotone-approach invariant up to nu_max.
  void validate(int nu_max) const;
};

struct ScalingStep {
  int index = 0;
  CVec orbit_point;
  HoloMap phi;
  Dilatation dilatation;
  HoloMap sigma;  // Lambda_nu o phi_nu
};

std::vector<ScalingStep> pinchuk_scaling_sequence(const OrbitSpec& orbit, int nu_max);

// ------------------------------------------------------------ reports

struct ConvergenceRow {
  int index = 0;
  double deviation_a = 0.0;
  double deviation_b = 0.0;
  double fitted_limit = 0.0;  // running mean of max(deviation_a, deviation_b) over the window
};

struct ConvergenceReport {
  std::string quantity;
  std::vector<ConvergenceRow> rows;
  double target = 0.0;
  double tolerance = 1e-2;
  int window = 3;
  double fitted_limit = 0.0;
  bool pass = false;

  /// Recomputes running window means, fitted limit and verdict.
  void finalize();
  std::string verdict() const { return pass ? "pass" : "fail"; }
  std::string to_csv() const;
};

nlohmann::json to_json(const ConvergenceReport& r);

// --------------------------------------------------- set convergence

/// Distance from x to {rho = 0} by alternating tangent-plane projection and
/// Newton steps; 0 when rho(x) <= 0.
double distance_to_domain(const DefiningFunction& rho, const CVec& x, int max_iter = 200);

/// Seeded uniform samples of the box center + [-h, h]^{2d}.
std::vector<CVec> box_samples(const CVec& center, double half_width, int count, unsigned seed);

/// Box samples with rho <= -margin.
std::vector<CVec> interior_samples(const DefiningFunction& rho, const CVec& center, double half_width,
                                   int count, double margin, unsigned seed);

struct NormalConvergenceOptions {
  std::vector<CVec> compact;  // target-interior samples for deviation (a)
  CVec reference;             // default e0
  CVec box_center;            // default reference
  double box_half_width = 1.0;
  int box_count = 4000;
  unsigned seed = 11;
  double tolerance = 1e-2;
  int window = 3;
};

/// Per map nu, with rho_nu = source o map_nu^{-1} a defining function of the
/// scaled domain rescaled to agree with target at the reference point:
/// (a) sup over the compact of |rho_nu - rho_target|,
/// (b) sup over box samples inside the scaled domain of the distance to the target.
ConvergenceReport normal_convergence_check(const std::vector<HoloMap>& maps, const std::vector<int>& indices,
                                           const DefiningFunction& source, const DefiningFunction& target,
                                           const NormalConvergenceOptions& opts);
ConvergenceReport normal_convergence_check(const std::vector<AffineMap>& maps, const std::vector<int>& indices,
                                           const DefiningFunction& source, const DefiningFunction& target,
                                           const NormalConvergenceOptions& opts);

struct AffineFit {
  AffineMap map;
  double residual = 0.0;
};

/// Least-squares affine T with T(x_i) ~ y_i; residual is max_i |T(x_i) - y_i|.
AffineFit fit_affine(const std::vector<CVec>& x, const std::vector<CVec>& y);

/// Residual of the affine fit of sigma_nu against omega_nu over the samples, per index.
ConvergenceReport frankel_pinchuk_compare(const OrbitSpec& orbit, const std::vector<int>& indices,
                                          const std::vector<CVec>& compact, double tolerance = 1e-3);

// ------------------------------------------------- Caratheodory kernel

struct GridSpec {
  CVec center;  // default origin
  double half_width = 1.2;
  double spacing = 0.02;
};

struct DomainSequence {
  std::function<bool(int, const CVec&)> contains;  // (nu, x), nu >= 1
  std::string description;
};

DomainSequence ball_sequence(std::function<double(int)> radius, std::string description);
DomainSequence constant_sequence(const DefiningFunction& rho);

struct KernelEstimate {
  int dim = 0;
  GridSpec grid;
  int per_axis = 0;
  int horizon = 0;
  int window = 0;
  bool degenerate = false;  // kernel is {p}
  CVec p;
  std::vector<char> marked;  // indexed like grid_point

  std::size_t size() const { return marked.size(); }
  std::size_t marked_count() const;
  CVec grid_point(std::size_t index) const;
};

KernelEstimate caratheodory_kernel_estimate(const DomainSequence& seq, const CVec& p, const GridSpec& grid,
                                            int horizon = 200, int window = 5);

nlohmann::json to_json(const KernelEstimate& k);

}  // namespace cscale
