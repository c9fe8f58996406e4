#pragma once

// Sum-factorization building blocks. Element arrays are lexicographic with the
// r index fastest, then s, then t.

#include <algorithm>
#include <vector>

namespace nekmini::tensor {

// out[q][a] = sum_b M[a][b] in[q][b]  for q < rest  (contraction along r)
template <class T>
inline void contract_r(int mo, int mi, const T* M, const T* in, T* out, int rest) {
  for (int q = 0; q < rest; ++q) {
    const T* iq = in + static_cast<size_t>(q) * mi;
    T* oq = out + static_cast<size_t>(q) * mo;
    for (int a = 0; a < mo; ++a) {
      const T* ma = M + static_cast<size_t>(a) * mi;
      T s = 0;
      for (int b = 0; b < mi; ++b) s += ma[b] * iq[b];
      oq[a] = s;
    }
  }
}

// out[t][a][i] = sum_b M[a][b] in[t][b][i]  (contraction along s)
template <class T>
inline void contract_s(int mo, int mi, const T* M, const T* in, T* out, int nr, int nt) {
  for (int t = 0; t < nt; ++t) {
    const T* it = in + static_cast<size_t>(t) * mi * nr;
    T* ot = out + static_cast<size_t>(t) * mo * nr;
    for (int a = 0; a < mo; ++a) {
      T* row = ot + static_cast<size_t>(a) * nr;
      std::fill(row, row + nr, T(0));
      for (int b = 0; b < mi; ++b) {
        const T m = M[static_cast<size_t>(a) * mi + b];
        const T* src = it + static_cast<size_t>(b) * nr;
        for (int i = 0; i < nr; ++i) row[i] += m * src[i];
      }
    }
  }
}

// out[a][...] = sum_b M[a][b] in[b][...]  (contraction along t; plane = nr*ns)
template <class T>
inline void contract_t(int mo, int mi, const T* M, const T* in, T* out, int plane) {
  for (int a = 0; a < mo; ++a) {
    T* oa = out + static_cast<size_t>(a) * plane;
    std::fill(oa, oa + plane, T(0));
    for (int b = 0; b < mi; ++b) {
      const T m = M[static_cast<size_t>(a) * mi + b];
      const T* src = in + static_cast<size_t>(b) * plane;
      for (int i = 0; i < plane; ++i) oa[i] += m * src[i];
    }
  }
}

// out = (Mt x Ms x Mr) in, with in of shape mi^3 and out of shape mo^3.
// work must hold at least 2 * max(mi,mo)^3 entries.
template <class T>
inline void apply3(int mo, int mi, const T* Mr, const T* Ms, const T* Mt, const T* in, T* out,
                   T* work) {
  const int big = std::max(mo, mi);
  T* w1 = work;
  T* w2 = work + static_cast<size_t>(big) * big * big;
  contract_r(mo, mi, Mr, in, w1, mi * mi);          // mi x mi x mo
  contract_s(mo, mi, Ms, w1, w2, mo, mi);           // mi x mo x mo
  contract_t(mo, mi, Mt, w2, out, mo * mo);         // mo x mo x mo
}

template <class T>
inline std::vector<T> transpose(const std::vector<T>& m, int rows, int cols) {
  std::vector<T> t(static_cast<size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t[static_cast<size_t>(j) * rows + i] = m[static_cast<size_t>(i) * cols + j];
  return t;
}

}  // namespace nekmini::tensor
