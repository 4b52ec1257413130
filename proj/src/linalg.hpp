// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

namespace shotfield::linalg {

/// Eigenvalues (ascending) of a symmetric banded matrix given in LAPACK
/// lower band storage: ab[j*ldab + (i-j)] = A(i,j), ldab = kd+1.
std::vector<double> banded_eigenvalues(std::vector<double> ab, int n, int kd);

/// log det of a symmetric positive definite banded matrix (lower band
/// storage, consumed).  Returns false if the matrix is not PD.
bool banded_cholesky_logdet(std::vector<double>& ab, int n, int kd,
                            double& logdet);

/// Complex Hermitian variant.
bool banded_cholesky_logdet(std::vector<std::complex<double>>& ab, int n,
                            int kd, double& logdet);

/// Eigenvalues (ascending) of a small dense symmetric matrix
/// (row-major n x n).
std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n);

}  // namespace shotfield::linalg
