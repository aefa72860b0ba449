#include "accentnet/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "accentnet/error.hpp"
#include "accentnet/gemm.hpp"
#include "accentnet/io_util.hpp"

namespace accentnet::dsp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogFloor = 1e-10;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Reflection without edge repetition (numpy "reflect"): index m of a virtual
// signal mirrored around both ends, mapped back into [0, n).
std::size_t reflect_index(long m, std::size_t n) {
  if (n == 1) return 0;
  const long period = 2 * static_cast<long>(n) - 2;
  long r = m % period;
  if (r < 0) r += period;
  if (r >= static_cast<long>(n)) r = period - r;
  return static_cast<std::size_t>(r);
}

}  // namespace

void DspConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) data_error("dsp config: alpha must be in [0,1)");
  if (frame_len < 1 || hop < 1) data_error("dsp config: frame_len and hop must be >= 1");
  if (!is_power_of_two(n_fft)) data_error("dsp config: n_fft must be a power of two");
  if (n_fft < frame_len) data_error("dsp config: n_fft must be >= frame_len");
  if (n_mfcc < 1 || n_mels < 1 || n_mfcc > n_mels)
    data_error("dsp config: need 1 <= n_mfcc <= n_mels");
  if (mel_constant <= 0.0) data_error("dsp config: mel_constant must be positive");
  if (fmin < 0.0) data_error("dsp config: fmin must be >= 0");
  if (fmax != 0.0 && fmax <= fmin) data_error("dsp config: fmax must exceed fmin");
}

std::string DspConfig::canonical_string() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "alpha=%.10g;frame_len=%d;hop=%d;n_fft=%d;n_mels=%d;n_mfcc=%d;mel_constant=%.10g;"
                "fmin=%.10g;fmax=%.10g",
                alpha, frame_len, hop, n_fft, n_mels, n_mfcc, mel_constant, fmin, fmax);
  return buf;
}

std::vector<double> pre_emphasis(const std::vector<double>& signal, double alpha) {
  if (signal.empty()) data_error("pre_emphasis: empty signal");
  std::vector<double> out(signal.size());
  out[0] = signal[0];
  for (std::size_t i = 1; i < signal.size(); ++i) out[i] = signal[i] - alpha * signal[i - 1];
  return out;
}

std::vector<std::vector<double>> frame_signal(const std::vector<double>& signal, int frame_len,
                                              int hop) {
  if (signal.empty()) data_error("frame_signal: empty signal");
  check_internal(frame_len >= 1 && hop >= 1, "frame_signal: frame_len and hop must be >= 1");
  const std::size_t n = signal.size();
  const std::size_t n_frames = n / static_cast<std::size_t>(hop);
  const long pad = frame_len / 2;
  std::vector<std::vector<double>> frames(n_frames, std::vector<double>(frame_len));
  for (std::size_t f = 0; f < n_frames; ++f) {
    const long start = static_cast<long>(f) * hop - pad;
    for (int j = 0; j < frame_len; ++j) frames[f][j] = signal[reflect_index(start + j, n)];
  }
  return frames;
}

std::vector<double> window_coefficients(Window kind, int length) {
  check_internal(length >= 1, "window_coefficients: length must be >= 1");
  std::vector<double> w(length, 1.0);
  switch (kind) {
    case Window::rectangular:
      break;
    case Window::hann:
      if (length == 1) break;
      for (int k = 0; k < length; ++k)
        w[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * k / (length - 1));
      break;
    default:
      data_error("apply_window: unknown window id");
  }
  return w;
}

void apply_window(std::vector<std::vector<double>>& frames, Window kind) {
  if (frames.empty()) data_error("apply_window: no frames");
  const auto w = window_coefficients(kind, static_cast<int>(frames[0].size()));
  for (auto& frame : frames) {
    check_internal(frame.size() == w.size(), "apply_window: ragged frames");
    for (std::size_t k = 0; k < frame.size(); ++k) frame[k] *= w[k];
  }
}

void fft(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(static_cast<int>(n)))
    data_error("fft: length " + std::to_string(n) + " is not a power of two");
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> w(std::cos(ang * static_cast<double>(j)),
                                     std::sin(ang * static_cast<double>(j)));
        const std::complex<double> u = x[i + j];
        const std::complex<double> v = x[i + j + len / 2] * w;
        x[i + j] = u + v;
        x[i + j + len / 2] = u - v;
      }
    }
  }
}

std::vector<std::vector<double>> power_spectrum(const std::vector<std::vector<double>>& frames,
                                                int n_fft) {
  check_internal(is_power_of_two(n_fft), "power_spectrum: n_fft must be a power of two");
  const std::size_t bins = static_cast<std::size_t>(n_fft) / 2 + 1;
  std::vector<std::vector<double>> out(frames.size(), std::vector<double>(bins));
  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    check_internal(frames[f].size() <= static_cast<std::size_t>(n_fft),
                   "power_spectrum: frame longer than n_fft");
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t j = 0; j < frames[f].size(); ++j) buf[j] = frames[f][j];
    fft(buf);
    for (std::size_t k = 0; k < bins; ++k) out[f][k] = std::norm(buf[k]);
  }
  return out;
}

double hz_to_mel(double f, double mel_constant) {
  if (f < 0.0) data_error("hz_to_mel: negative frequency");
  return mel_constant * std::log10(1.0 + f / 700.0);
}

double mel_to_hz(double mel, double mel_constant) {
  return 700.0 * (std::pow(10.0, mel / mel_constant) - 1.0);
}

std::vector<std::vector<double>> mel_filterbank(const DspConfig& cfg, int sample_rate) {
  cfg.validate();
  check_internal(sample_rate > 0, "mel_filterbank: bad sample rate");
  const double fmax = cfg.fmax > 0.0 ? cfg.fmax : sample_rate / 2.0;
  if (fmax > sample_rate / 2.0) data_error("mel_filterbank: fmax above Nyquist");
  const std::size_t bins = static_cast<std::size_t>(cfg.n_fft) / 2 + 1;

  const double mel_lo = hz_to_mel(cfg.fmin, cfg.mel_constant);
  const double mel_hi = hz_to_mel(fmax, cfg.mel_constant);
  std::vector<double> hz_points(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);
    hz_points[i] = mel_to_hz(mel, cfg.mel_constant);
  }

  std::vector<std::vector<double>> fb(cfg.n_mels, std::vector<double>(bins, 0.0));
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = hz_points[m], center = hz_points[m + 1], right = hz_points[m + 2];
    const double norm = 2.0 / (right - left);
    bool nonzero = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / cfg.n_fft;
      double w = 0.0;
      if (f > left && f < right)
        w = (f <= center) ? (f - left) / (center - left) : (right - f) / (right - center);
      fb[m][k] = w * norm;
      nonzero = nonzero || w > 0.0;
    }
    if (!nonzero)
      data_error("mel_filterbank: filter " + std::to_string(m) +
                 " covers no FFT bins; n_mels too large for n_fft resolution");
  }
  return fb;
}

std::vector<double> dct2_ortho(const std::vector<double>& x, int n_keep) {
  const int m = static_cast<int>(x.size());
  check_internal(m >= 1 && n_keep >= 1 && n_keep <= m, "dct2_ortho: bad sizes");
  std::vector<double> y(n_keep);
  const double s0 = std::sqrt(1.0 / m);
  const double sk = std::sqrt(2.0 / m);
  for (int k = 0; k < n_keep; ++k) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += x[j] * std::cos(kPi * k * (2.0 * j + 1.0) / (2.0 * m));
    y[k] = (k == 0 ? s0 : sk) * acc;
  }
  return y;
}

std::vector<double> dct3_ortho(const std::vector<double>& y, int n_out) {
  const int m = n_out;
  const int k_in = static_cast<int>(y.size());
  check_internal(m >= 1 && k_in >= 1 && k_in <= m, "dct3_ortho: bad sizes");
  std::vector<double> x(m);
  const double s0 = std::sqrt(1.0 / m);
  const double sk = std::sqrt(2.0 / m);
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int k = 0; k < k_in; ++k)
      acc += (k == 0 ? s0 : sk) * y[k] * std::cos(kPi * k * (2.0 * j + 1.0) / (2.0 * m));
    x[j] = acc;
  }
  return x;
}

FeatureMap mfcc(const dataset::AudioClip& clip, const DspConfig& cfg) {
  cfg.validate();
  if (clip.length() == 0) data_error("mfcc: empty clip");
  const auto fb = mel_filterbank(cfg, clip.sample_rate);
  const std::size_t bins = static_cast<std::size_t>(cfg.n_fft) / 2 + 1;

  // DCT basis, precomputed once: (n_mfcc, n_mels).
  std::vector<double> dct(static_cast<std::size_t>(cfg.n_mfcc) * cfg.n_mels);
  const double s0 = std::sqrt(1.0 / cfg.n_mels);
  const double sk = std::sqrt(2.0 / cfg.n_mels);
  for (int k = 0; k < cfg.n_mfcc; ++k)
    for (int j = 0; j < cfg.n_mels; ++j)
      dct[static_cast<std::size_t>(k) * cfg.n_mels + j] =
          (k == 0 ? s0 : sk) * std::cos(kPi * k * (2.0 * j + 1.0) / (2.0 * cfg.n_mels));

  FeatureMap fm;
  fm.channels = clip.channels();
  fm.coeffs = cfg.n_mfcc;
  int n_frames = -1;

  std::vector<std::vector<float>> channel_data;
  for (int ch = 0; ch < clip.channels(); ++ch) {
    std::vector<double> signal(clip.samples[ch].begin(), clip.samples[ch].end());
    signal = pre_emphasis(signal, cfg.alpha);
    auto frames = frame_signal(signal, cfg.frame_len, cfg.hop);
    if (frames.empty()) data_error("mfcc: clip shorter than one hop");
    apply_window(frames, Window::hann);
    auto spec = power_spectrum(frames, cfg.n_fft);
    const int nf = static_cast<int>(spec.size());
    if (n_frames < 0) n_frames = nf;
    check_internal(n_frames == nf, "mfcc: channel frame counts differ");

    // mel_spec (n_mels, n_frames) = fb (n_mels, bins) x spec^T (bins, n_frames)
    std::vector<double> spec_t(bins * nf);
    for (int t = 0; t < nf; ++t)
      for (std::size_t k = 0; k < bins; ++k) spec_t[k * nf + t] = spec[t][k];
    std::vector<double> fb_flat(static_cast<std::size_t>(cfg.n_mels) * bins);
    for (int m = 0; m < cfg.n_mels; ++m)
      std::copy(fb[m].begin(), fb[m].end(), fb_flat.begin() + static_cast<std::size_t>(m) * bins);
    std::vector<double> mel_spec(static_cast<std::size_t>(cfg.n_mels) * nf);
    gemm(fb_flat.data(), spec_t.data(), mel_spec.data(), cfg.n_mels, bins, nf);

    for (double& v : mel_spec) v = std::log(v + kLogFloor);

    // coeffs (n_mfcc, n_frames) = dct (n_mfcc, n_mels) x mel_spec
    std::vector<double> coeffs(static_cast<std::size_t>(cfg.n_mfcc) * nf);
    gemm(dct.data(), mel_spec.data(), coeffs.data(), cfg.n_mfcc, cfg.n_mels, nf);

    std::vector<float> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = static_cast<float>(coeffs[i]);
    channel_data.push_back(std::move(out));
  }

  fm.frames = n_frames;
  fm.data.reserve(static_cast<std::size_t>(fm.channels) * fm.coeffs * fm.frames);
  for (auto& ch : channel_data) fm.data.insert(fm.data.end(), ch.begin(), ch.end());
  return fm;
}

void write_feature_cache(const FeatureMap& fm, const std::string& path) {
  std::string out;
  out.append("MFC1", 4);
  io::put_u32(out, static_cast<std::uint32_t>(fm.channels));
  io::put_u32(out, static_cast<std::uint32_t>(fm.coeffs));
  io::put_u32(out, static_cast<std::uint32_t>(fm.frames));
  check_internal(fm.data.size() ==
                     static_cast<std::size_t>(fm.channels) * fm.coeffs * fm.frames,
                 "write_feature_cache: data/shape mismatch");
  for (float v : fm.data) io::put_f32(out, v);
  io::write_file_atomic(path, out);
}

FeatureMap read_feature_cache(const std::string& path) {
  const std::string bytes = io::read_file(path);
  io::ByteReader r(bytes, path);
  if (r.raw(4, "magic") != "MFC1") data_error(path + ": bad magic, not an MFC1 feature cache");
  FeatureMap fm;
  fm.channels = static_cast<int>(r.u32("channels"));
  fm.coeffs = static_cast<int>(r.u32("coeffs"));
  fm.frames = static_cast<int>(r.u32("frames"));
  if (fm.channels < 1 || fm.coeffs < 1 || fm.frames < 1)
    data_error(path + ": invalid feature dimensions");
  const std::size_t numel = static_cast<std::size_t>(fm.channels) * fm.coeffs * fm.frames;
  r.require(numel * 4, "feature data");
  fm.data.resize(numel);
  for (std::size_t i = 0; i < numel; ++i) fm.data[i] = r.f32("feature data");
  fm.source_id = path;
  return fm;
}

}  // namespace accentnet::dsp
