#include "affect/audio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "affect/errors.hpp"

namespace affect {
namespace {

constexpr double kPi = std::numbers::pi;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT; lengths are always powers of two here.
void fft(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (std::size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const double ur = re[i + k], ui = im[i + k];
        const double vr = re[i + k + len / 2] * cr - im[i + k + len / 2] * ci;
        const double vi = re[i + k + len / 2] * ci + im[i + k + len / 2] * cr;
        re[i + k] = ur + vr;
        im[i + k] = ui + vi;
        re[i + k + len / 2] = ur - vr;
        im[i + k + len / 2] = ui - vi;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

}  // namespace

AudioSegment resample(const AudioSegment& seg, std::uint32_t target_hz) {
  if (target_hz == 0) throw ConfigError("resample: target rate must be > 0");
  if (target_hz > seg.sample_rate) {
    throw UnsupportedError("resample: upsampling from " +
                           std::to_string(seg.sample_rate) + " Hz to " +
                           std::to_string(target_hz) + " Hz is not supported");
  }
  if (target_hz == seg.sample_rate) return seg;

  const std::size_t n = seg.samples.size();
  AudioSegment out;
  out.sample_rate = target_hz;
  if (n == 0) return out;

  // 127-tap Hamming-windowed sinc low-pass at 0.45 * target (normalized to
  // the source rate), unit DC gain.
  constexpr int kTaps = 127;
  constexpr int kHalf = kTaps / 2;
  const double fc = 0.45 * static_cast<double>(target_hz) / seg.sample_rate;
  std::vector<double> h(kTaps);
  double h_sum = 0.0;
  for (int k = 0; k < kTaps; ++k) {
    const double m = static_cast<double>(k - kHalf);
    const double sinc =
        m == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * m) / (kPi * m);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * kPi * k / (kTaps - 1));
    h[k] = sinc * window;
    h_sum += h[k];
  }
  for (double& v : h) v /= h_sum;

  std::vector<double> filtered(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < kTaps; ++k) {
      const std::ptrdiff_t idx =
          static_cast<std::ptrdiff_t>(i) + k - kHalf;
      if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n)) {
        acc += h[k] * seg.samples[static_cast<std::size_t>(idx)];
      }
    }
    filtered[i] = acc;
  }

  const double ratio =
      static_cast<double>(seg.sample_rate) / static_cast<double>(target_hz);
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) * target_hz / seg.sample_rate));
  out.samples.resize(out_len);
  for (std::size_t j = 0; j < out_len; ++j) {
    const double pos = static_cast<double>(j) * ratio;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 + 1 < n) {
      const double frac = pos - static_cast<double>(i0);
      out.samples[j] = (1.0 - frac) * filtered[i0] + frac * filtered[i0 + 1];
    } else {
      out.samples[j] = filtered[std::min(i0, n - 1)];
    }
  }
  return out;
}

std::vector<std::vector<double>> frame(const AudioSegment& seg,
                                       double window_ms, double step_ms) {
  if (seg.samples.empty()) throw EmptyInputError("frame: empty segment");
  if (!(step_ms > 0.0) || window_ms < step_ms) {
    throw ConfigError("frame: require window_ms >= step_ms > 0");
  }
  const auto to_samples = [&](double ms) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(ms * seg.sample_rate / 1000.0)));
  };
  const std::size_t w = to_samples(window_ms);
  const std::size_t s = to_samples(step_ms);
  const std::size_t n = seg.samples.size();

  std::vector<std::vector<double>> frames;
  if (n < w) {
    std::vector<double> padded(w, 0.0);
    std::copy(seg.samples.begin(), seg.samples.end(), padded.begin());
    frames.push_back(std::move(padded));
    return frames;
  }
  const std::size_t count = (n - w) / s + 1;
  frames.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    frames.emplace_back(seg.samples.begin() + t * s,
                        seg.samples.begin() + t * s + w);
  }
  return frames;
}

Tensor mfcc(const std::vector<double>& frame_samples,
            std::uint32_t sample_rate, const MfccConfig& cfg) {
  if (frame_samples.empty()) throw EmptyInputError("mfcc: empty frame");
  if (cfg.num_coefficients == 0 || cfg.num_filters < cfg.num_coefficients) {
    throw ConfigError("mfcc: need num_filters >= num_coefficients >= 1");
  }
  const std::size_t n = frame_samples.size();

  std::vector<double> x(n);
  x[0] = frame_samples[0];
  for (std::size_t i = 1; i < n; ++i) {
    x[i] = frame_samples[i] - cfg.pre_emphasis * frame_samples[i - 1];
  }
  if (n > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] *= 0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));
    }
  }

  const std::size_t nfft = std::max<std::size_t>(2, next_pow2(n));
  std::vector<double> re(nfft, 0.0), im(nfft, 0.0);
  std::copy(x.begin(), x.end(), re.begin());
  fft(re, im);
  const std::size_t bins = nfft / 2 + 1;
  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    power[k] = (re[k] * re[k] + im[k] * im[k]) / static_cast<double>(nfft);
  }

  // Triangular filters on a mel-spaced grid from 0 Hz to Nyquist, mapped to
  // FFT bins via floor((nfft + 1) * hz / rate).
  const std::size_t nf = cfg.num_filters;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<std::size_t> bin(nf + 2);
  for (std::size_t i = 0; i < nf + 2; ++i) {
    const double mel = mel_max * static_cast<double>(i) / (nf + 1);
    bin[i] = static_cast<std::size_t>(
        std::floor((nfft + 1) * mel_to_hz(mel) / sample_rate));
  }

  std::vector<double> log_energies(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    double e = 0.0;
    for (std::size_t k = bin[j]; k < bin[j + 1] && k < bins; ++k) {
      e += power[k] * static_cast<double>(k - bin[j]) /
           static_cast<double>(bin[j + 1] - bin[j]);
    }
    for (std::size_t k = bin[j + 1]; k < bin[j + 2] && k < bins; ++k) {
      e += power[k] * static_cast<double>(bin[j + 2] - k) /
           static_cast<double>(bin[j + 2] - bin[j + 1]);
    }
    log_energies[j] = std::log(std::max(e, cfg.log_floor));
  }

  // Orthonormal DCT-II, coefficients 0..num_coefficients-1.
  Tensor out = Tensor::zeros({cfg.num_coefficients});
  const double nd = static_cast<double>(nf);
  for (std::size_t k = 0; k < cfg.num_coefficients; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nf; ++j) {
      acc += log_energies[j] *
             std::cos(kPi * static_cast<double>(k) * (2.0 * j + 1.0) /
                      (2.0 * nd));
    }
    out.data[k] = acc * (k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd));
  }
  return out;
}

std::vector<Tensor> delta(const std::vector<Tensor>& features,
                          std::size_t w) {
  if (features.empty()) throw EmptyInputError("delta: empty sequence");
  if (w == 0) throw ConfigError("delta: window must be >= 1");
  const std::size_t t_max = features.size() - 1;
  for (const Tensor& f : features) {
    if (!f.same_shape(features.front())) {
      throw DimensionError("delta: mixed frame shapes " +
                           shape_str(features.front()) + " and " +
                           shape_str(f));
    }
  }
  double denom = 0.0;
  for (std::size_t k = 1; k <= w; ++k) denom += static_cast<double>(k * k);
  denom *= 2.0;

  std::vector<Tensor> out;
  out.reserve(features.size());
  for (std::size_t t = 0; t < features.size(); ++t) {
    Tensor d = Tensor::zeros(features.front().shape);
    for (std::size_t k = 1; k <= w; ++k) {
      const Tensor& ahead = features[std::min(t + k, t_max)];
      const Tensor& behind = features[t >= k ? t - k : 0];
      for (std::size_t i = 0; i < d.data.size(); ++i) {
        d.data[i] +=
            static_cast<double>(k) * (ahead.data[i] - behind.data[i]);
      }
    }
    for (double& v : d.data) v /= denom;
    out.push_back(std::move(d));
  }
  return out;
}

double pitch(const std::vector<double>& frame_samples,
             std::uint32_t sample_rate, const PitchConfig& cfg) {
  const std::size_t n = frame_samples.size();
  const double rate = static_cast<double>(sample_rate);
  // Need at least two periods of the lowest trackable frequency.
  if (static_cast<double>(n) < 2.0 * rate / cfg.min_hz) return 0.0;

  double r0 = 0.0;
  for (double v : frame_samples) r0 += v * v;
  if (r0 <= 0.0) return 0.0;

  const auto lag_min = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(rate / cfg.max_hz)));
  const auto lag_max =
      static_cast<std::size_t>(std::ceil(rate / cfg.min_hz));
  if (lag_max >= n) return 0.0;

  std::vector<double> r(lag_max + 2, 0.0);
  const std::size_t lo = lag_min > 1 ? lag_min - 1 : 1;
  const std::size_t hi = std::min(lag_max + 1, n - 1);
  for (std::size_t lag = lo; lag <= hi; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      acc += frame_samples[i] * frame_samples[i + lag];
    }
    r[lag] = acc;
  }

  std::size_t best = lag_min;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    if (r[lag] > r[best]) best = lag;
  }
  if (r[best] / r0 < cfg.voicing_threshold) return 0.0;

  // Parabolic interpolation around the peak for sub-sample lag precision.
  double refined = static_cast<double>(best);
  if (best > lo && best < hi) {
    const double a = r[best - 1], b = r[best], c = r[best + 1];
    const double denom = a - 2.0 * b + c;
    if (std::abs(denom) > 1e-30) {
      const double shift = std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
      refined += shift;
    }
  }
  return rate / refined;
}

double energy(const std::vector<double>& frame_samples) {
  if (frame_samples.empty()) throw EmptyInputError("energy: empty frame");
  double acc = 0.0;
  for (double v : frame_samples) acc += v * v;
  return acc / static_cast<double>(frame_samples.size());
}

double zcr(const std::vector<double>& frame_samples) {
  if (frame_samples.empty()) throw EmptyInputError("zcr: empty frame");
  const std::size_t n = frame_samples.size();
  if (n == 1) return 0.0;
  std::size_t crossings = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (frame_samples[i - 1] * frame_samples[i] < 0.0) ++crossings;
  }
  return static_cast<double>(crossings) / static_cast<double>(n - 1);
}

std::vector<Tensor> frame_features(const AudioSegment& seg, double window_ms,
                                   double step_ms, const MfccConfig& mfcc_cfg,
                                   const PitchConfig& pitch_cfg) {
  const auto frames = frame(seg, window_ms, step_ms);
  std::vector<Tensor> coeffs;
  coeffs.reserve(frames.size());
  for (const auto& f : frames) {
    coeffs.push_back(mfcc(f, seg.sample_rate, mfcc_cfg));
  }
  const std::vector<Tensor> d1 = delta(coeffs, 2);
  const std::vector<Tensor> d2 = delta(d1, 2);

  const std::size_t c = mfcc_cfg.num_coefficients;
  std::vector<Tensor> out;
  out.reserve(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    Tensor v = Tensor::zeros({3 * c + 3});
    for (std::size_t i = 0; i < c; ++i) {
      v.data[i] = coeffs[t].data[i];
      v.data[c + i] = d1[t].data[i];
      v.data[2 * c + i] = d2[t].data[i];
    }
    v.data[3 * c] = pitch(frames[t], seg.sample_rate, pitch_cfg);
    v.data[3 * c + 1] = energy(frames[t]);
    v.data[3 * c + 2] = zcr(frames[t]);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace affect
