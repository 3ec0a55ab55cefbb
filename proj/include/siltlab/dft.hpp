#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace silt {

// Plain separable DFT on the d-dimensional torus grid, O(N * R) per axis.
// Sizes here are small (R^d capped well below 2^24 by callers), so no FFT
// machinery is warranted; this keeps the transform exact for any R, not just
// powers of two.  Layout is row-major: flat = ((k_0 R + k_1) R + ...) + k_{d-1}.
class SeparableDft {
 public:
  SeparableDft(int d, int R);

  // unnormalized; inverse uses the conjugate twiddles (no 1/N factor)
  void forward(std::complex<double>* a) const { transform(a, false); }
  void inverse(std::complex<double>* a) const { transform(a, true); }

  std::int64_t size() const { return n_; }

 private:
  void transform(std::complex<double>* a, bool inverse) const;

  int d_, R_;
  std::int64_t n_;
  std::vector<std::complex<double>> w_;  // w_[t] = exp(-i 2 pi t / R)
};

inline SeparableDft::SeparableDft(int d, int R) : d_(d), R_(R) {
  n_ = 1;
  for (int j = 0; j < d; ++j) n_ *= R;
  w_.resize(R);
  const double step = -6.283185307179586476925286766559 / R;
  for (int t = 0; t < R; ++t) w_[t] = std::polar(1.0, step * t);
}

inline void SeparableDft::transform(std::complex<double>* a, bool inverse) const {
  std::vector<std::complex<double>> line(R_);
  std::int64_t stride = n_ / R_;  // axis 0 first, innermost axis last
  for (int ax = 0; ax < d_; ++ax) {
    const std::int64_t block = stride * R_;
    for (std::int64_t outer = 0; outer < n_; outer += block) {
      for (std::int64_t inner = 0; inner < stride; ++inner) {
        std::complex<double>* base = a + outer + inner;
        for (int j = 0; j < R_; ++j) line[j] = base[j * stride];
        for (int k = 0; k < R_; ++k) {
          std::complex<double> acc{0.0, 0.0};
          for (int j = 0; j < R_; ++j) {
            std::complex<double> w = w_[(static_cast<std::int64_t>(j) * k) % R_];
            if (inverse) w = std::conj(w);
            acc += line[j] * w;
          }
          base[k * stride] = acc;
        }
      }
    }
    stride /= R_;
  }
}

}  // namespace silt
