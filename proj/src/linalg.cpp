// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "linalg.hpp"

#include <cmath>

#include "shotfield/common.hpp"

extern "C" {
void dsbev_(const char* jobz, const char* uplo, const int* n, const int* kd,
            double* ab, const int* ldab, double* w, double* z, const int* ldz,
            double* work, int* info);
void dpbtrf_(const char* uplo, const int* n, const int* kd, double* ab,
             const int* ldab, int* info);
void zpbtrf_(const char* uplo, const int* n, const int* kd,
             std::complex<double>* ab, const int* ldab, int* info);
void dsyev_(const char* jobz, const char* uplo, const int* n, double* a,
            const int* lda, double* w, double* work, const int* lwork,
            int* info);
}

namespace shotfield::linalg {

std::vector<double> banded_eigenvalues(std::vector<double> ab, int n, int kd) {
  const int ldab = kd + 1;
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> work(static_cast<std::size_t>(3 * n > 1 ? 3 * n : 1));
  int info = 0;
  dsbev_("N", "L", &n, &kd, ab.data(), &ldab, w.data(), nullptr, &n,
         work.data(), &info);
  if (info != 0)
    throw numerical_failure("dsbev failed, info=" + std::to_string(info));
  return w;
}

bool banded_cholesky_logdet(std::vector<double>& ab, int n, int kd,
                            double& logdet) {
  const int ldab = kd + 1;
  int info = 0;
  dpbtrf_("L", &n, &kd, ab.data(), &ldab, &info);
  if (info > 0) return false;
  if (info < 0)
    throw numerical_failure("dpbtrf failed, info=" + std::to_string(info));
  logdet = 0.0;
  for (int j = 0; j < n; ++j)
    logdet += 2.0 * std::log(ab[static_cast<std::size_t>(j) * ldab]);
  return true;
}

bool banded_cholesky_logdet(std::vector<std::complex<double>>& ab, int n,
                            int kd, double& logdet) {
  const int ldab = kd + 1;
  int info = 0;
  zpbtrf_("L", &n, &kd, ab.data(), &ldab, &info);
  if (info > 0) return false;
  if (info < 0)
    throw numerical_failure("zpbtrf failed, info=" + std::to_string(info));
  logdet = 0.0;
  for (int j = 0; j < n; ++j)
    logdet += 2.0 * std::log(ab[static_cast<std::size_t>(j) * ldab].real());
  return true;
}

std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  int lwork = 3 * n > 1 ? 34 * n : 1;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  int info = 0;
  dsyev_("N", "U", &n, a.data(), &n, w.data(), work.data(), &lwork, &info);
  if (info != 0)
    throw numerical_failure("dsyev failed, info=" + std::to_string(info));
  return w;
}

}  // namespace shotfield::linalg
