#ifndef ACCENTNET_DSP_HPP
#define ACCENTNET_DSP_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "accentnet/dataset.hpp"

namespace accentnet::dsp {

struct DspConfig {
  double alpha = 0.97;        // pre-emphasis factor, 0 <= alpha < 1
  int frame_len = 2048;       // samples per frame
  int hop = 512;              // samples between frame starts
  int n_fft = 2048;           // power of two, >= frame_len
  int n_mels = 128;           // mel filter count
  int n_mfcc = 64;            // kept DCT coefficients, <= n_mels
  double mel_constant = 2995; // multiplier of the mel(f) formula
  double fmin = 0.0;          // Hz
  double fmax = 0.0;          // Hz; 0 means sample_rate / 2

  void validate() const;
  std::string canonical_string() const;
};

enum class Window { rectangular, hann };

struct FeatureMap {
  int channels = 0;
  int coeffs = 0;
  int frames = 0;
  std::vector<float> data;  // row-major (channel, coeff, frame)
  std::string source_id;

  std::size_t size() const { return data.size(); }
  float at(int c, int m, int t) const {
    return data[(static_cast<std::size_t>(c) * coeffs + m) * frames + t];
  }
};

// y(0) = x(0); y(n) = x(n) - alpha * x(n-1)
std::vector<double> pre_emphasis(const std::vector<double>& signal, double alpha);

// Centered framing with reflection padding of frame_len/2 on both ends;
// frame i starts at i*hop in the padded signal; n_frames = floor(len / hop).
std::vector<std::vector<double>> frame_signal(const std::vector<double>& signal, int frame_len,
                                              int hop);

std::vector<double> window_coefficients(Window kind, int length);
void apply_window(std::vector<std::vector<double>>& frames, Window kind);

// In-place radix-2 decimation-in-time FFT; x.size() must be a power of two.
void fft(std::vector<std::complex<double>>& x);

// |FFT|^2 per frame over the non-negative-frequency half: n_fft/2 + 1 bins.
std::vector<std::vector<double>> power_spectrum(const std::vector<std::vector<double>>& frames,
                                                int n_fft);

double hz_to_mel(double f, double mel_constant);
double mel_to_hz(double mel, double mel_constant);

// n_mels triangular filters, centers uniform on the mel axis, slaney-style
// area normalization. Row-major (n_mels, n_fft/2 + 1).
std::vector<std::vector<double>> mel_filterbank(const DspConfig& cfg, int sample_rate);

// Orthonormal DCT-II over the leading axis of a length-m vector, and its
// inverse (DCT-III with the same scaling).
std::vector<double> dct2_ortho(const std::vector<double>& x, int n_keep);
std::vector<double> dct3_ortho(const std::vector<double>& y, int n_out);

FeatureMap mfcc(const dataset::AudioClip& clip, const DspConfig& cfg);

// "MFC1" cache: magic, u32 dims (channels, coeffs, frames), f32 LE data.
void write_feature_cache(const FeatureMap& fm, const std::string& path);
FeatureMap read_feature_cache(const std::string& path);

}  // namespace accentnet::dsp

#endif
