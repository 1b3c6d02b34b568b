#pragma once

/// Elementary and elliptic special functions on real arguments.
///
/// Elliptic quantities are expressed in terms of the parameter m (= k^2 in
/// the modulus convention) with 0 <= m <= 1.  Integrals of the first kind use
/// Carlson's symmetric form R_F evaluated by duplication; the Jacobi functions
/// use Bulirsch's descending Gauss transformation.  Both are accurate to a few
/// units in the last place for the parameter range used here.

namespace deltawell::special {

/// Carlson's symmetric integral R_F(x, y, z); at most one argument may be 0.
double carlson_rf(double x, double y, double z);

/// Incomplete elliptic integral of the first kind F(phi | m).
///
/// Any real phi is accepted through F(phi + k pi) = F(phi) + 2 k K(m).  For
/// m = 1 the integral diverges at |phi| >= pi/2 and +/-infinity is returned.
double elliptic_f(double phi, double m);

/// Complete elliptic integral K(m) = F(pi/2 | m), 0 <= m < 1.
double elliptic_k(double m);

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// sn, cn and dn of (u | m).
JacobiTriple jacobi(double u, double m);

double jacobi_dn(double u, double m);

/// Principal inverse of dn: the u in [0, K(m)] with dn(u | m) = v.
/// Requires sqrt(1 - m) <= v <= 1.
double jacobi_dn_inverse(double v, double m);

/// Nonnegative inverse of sech on (0, 1].
double sech_inverse(double v);

}  // namespace deltawell::special
