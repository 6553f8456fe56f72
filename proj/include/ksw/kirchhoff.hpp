#pragma once

#include <map>
#include <string>
#include <vector>

#include "ksw/polynomial.hpp"

// Hard-coded model layer: the six-dimensional rigid-body system with two
// quadratic control fields, its gauge reduction to a one-parameter system,
// the four conserved quantities, the weighted energy combination K, the
// stationary system obtained from grad K, and the degeneracy loci used by
// the random-specialisation sampler.  Every polynomial below is fixed model
// data; the accessors construct it once and self-check the defining
// algebraic identities (conservation, gradient/display match, determinant
// factorisation) on first use, throwing std::logic_error on any mismatch.

namespace ksw {

// An autonomous polynomial vector field together with its first integrals.
struct ModelSystem {
  RingPtr ring;                             // states first, then parameters
  std::vector<std::string> states;          // state names, field order
  std::vector<Poly> field;                  // d/dt of each state
  std::vector<std::string> integral_names;  // "H", "V1", "V2", "V3"
  std::vector<Poly> integrals;
};

// Full system: states M1,M2,M3,g1,g2,g3; parameters alpha, beta.
const ModelSystem& full_model();

// Reduced system: states s1,s2,s3,r1,r2,r3; parameters alpha, l0,l1,l2,l3
// (the weight parameters are part of the ring so that K stays polynomial).
const ModelSystem& reduced_model();

// Result of transporting the full system through the linear change of
// variables  M1 = s1 - (a/3) r3,  M2 = s2 - (b/3) r3,
// M3 = s3 + (a/3) r1 + (b/3) r2,  g_i = r_i  (old parameters = new/3),
// then setting the second control parameter b to zero.
struct TransformationReport {
  bool field_matches = false;      // transported field equals the reduced one
  bool v1_exact = false;           // V1 transports to V1 unchanged
  bool v2_exact = false;           // V2 transports to V2 unchanged
  bool v3_scaled = false;          // transported V3 == v3_scale * a^2 * V3
  bool h_admixture_pure = false;   // transported H == H + h_admixture*a^2*V2
  Rational v3_scale = 0;           // expected 2/9
  Rational h_admixture = 0;        // expected 2/9
  bool all_ok() const {
    return field_matches && v1_exact && v2_exact && v3_scaled &&
           h_admixture_pure;
  }
};
TransformationReport verify_transformation();

// K = l0*H - l1*V1 - l2*V2 - l3*V3 over the reduced ring.
const Poly& energy_combination();

// dK/dx for x = s1, s2, s3, r1, r2, r3 (in that order).
const std::vector<Poly>& energy_gradient();

// The published form of the stationary system, one polynomial per state in
// the same order as energy_gradient(); signs[i] in {+1,-1} records
// grad[i] == signs[i] * display[i] (verified at construction).
struct StationaryReference {
  std::vector<Poly> display;
  std::vector<int> signs;
};
const StationaryReference& stationary_reference();

// The stationary system after solving the last gradient component for r3
// (r3 = r3_numerator / pivot, pivot = alpha^2*l0 + 2*l2) and clearing the
// single pivot denominator from the one remaining equation that mentions
// r3.  Five polynomials in s1,s2,s3,r1,r2 and the parameters.
struct EliminatedSystem {
  RingPtr ring;                  // the reduced ring; r3 no longer occurs
  std::vector<Poly> equations;   // order: s1, s2, s3, r1, r2 components
  Poly pivot;                    // alpha^2*l0 + 2*l2
  Poly r3_numerator;             // -l1*s3
  std::vector<bool> cleared;     // equations[i] was multiplied by pivot

  // Substitute rational parameter values (all of alpha,l0,l1,l2,l3 must be
  // given) and re-express in stationary_ring().  Throws
  // std::invalid_argument if the pivot vanishes at the given point
  // ("degenerate pencil") or a value is missing.
  std::vector<Poly> specialize(
      const std::map<std::string, Rational>& params) const;
};
const EliminatedSystem& eliminated_system();

// Ring {r1, r2, s2, s1, s3}: declared order = the lexicographic order used
// for Groebner comparisons of specialised stationary systems.
const RingPtr& stationary_ring();

// The shipped lexicographic reference basis for the eliminated stationary
// ideal, parsed over the reduced ring (parameters symbolic).
const std::vector<Poly>& reference_basis();

// The reference basis at a rational parameter point, over stationary_ring().
std::vector<Poly> specialize_reference(
    const std::map<std::string, Rational>& params);

// Hessian of K at the origin of state space.
struct ZeroJacobianReport {
  std::vector<std::vector<Poly>> hessian;  // 6x6, entries in the parameters
  Poly determinant;                        // det(hessian), exact
  std::vector<Poly> factors;               // three irreducible factors
  Rational constant = 0;                   // determinant == constant * prod
};
const ZeroJacobianReport& zero_jacobian();

// Parameter-space polynomials that must all be nonzero for a random
// specialisation to be usable: the five parameters themselves, the pivot,
// the three determinant factors, and the three leading-coefficient loci of
// the reference basis.
const std::vector<Poly>& admissibility_loci();
bool admissible_sample(const std::map<std::string, Rational>& params);

}  // namespace ksw
