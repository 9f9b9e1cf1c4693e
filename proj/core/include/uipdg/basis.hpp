// Orthonormal modal bases on the reference triangle and the reference edge.
//
// The triangle basis is the collapsed-coordinate (Dubiner) construction,
// orthonormal with respect to the L2 inner product of the reference triangle
// {(x,y) : x >= 0, y >= 0, x + y <= 1}.  Under an affine map to a physical
// element E the mass matrix is therefore 2|E| times the identity.
//
// Ordering is degree-major: all functions of total degree d precede degree
// d+1, and within a degree the index j of the collapsed direction increases.
#pragma once

#include <vector>

namespace uipdg {

/// dim P_k on a triangle: (k+1)(k+2)/2.
constexpr int space_dim(int k) { return (k + 1) * (k + 2) / 2; }

/// Jacobi polynomial P_n^(alpha,beta) by three-term recurrence.
double jacobi_eval(int n, int alpha, int beta, double x);

/// Values of all space_dim(k) basis functions at reference point (x, y).
/// `values` must hold space_dim(k) doubles.
void dubiner_eval(int k, double x, double y, double* values);

/// Reference gradients of all basis functions at (x, y); `gx`, `gy` must
/// each hold space_dim(k) doubles.  Evaluation is exact on the closed
/// triangle including the collapsed vertex (0, 1).
void dubiner_grad(int k, double x, double y, double* gx, double* gy);

/// Orthonormal Legendre basis on the reference edge: values of
/// sqrt(2m+1) P_m(2t-1) for m = 0..k at parameter t in [0,1].
/// `values` must hold k+1 doubles.
void edge_basis_eval(int k, double t, double* values);

} // namespace uipdg
