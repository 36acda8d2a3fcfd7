#include "cinemaloop/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace cinemaloop {

namespace {

template <class A, class B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.extent() != b.extent())
    throw ArgumentError(std::string(what) + ": dimension mismatch (" + to_string(a.extent()) + " vs " +
                        to_string(b.extent()) + ")");
}

template <class T>
double raster_mse(const Raster<T>& a, const Raster<T>& b, double scale) {
  require_same_shape(a, b, "mse");
  if (a.channels() != b.channels()) throw ArgumentError("mse: channel count mismatch");
  double sum = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = (static_cast<double>(da[i]) - static_cast<double>(db[i])) * scale;
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

double psnr_from_mse(double m) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

/// Single-channel double plane.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Plane extract_channel(const ImageF& img, int c) {
  Plane p{img.width(), img.height(), {}};
  p.v.resize(static_cast<std::size_t>(p.width) * p.height);
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) p.v[static_cast<std::size_t>(y) * p.width + x] = img.at(x, y, c);
  return p;
}

Plane downsample(const Plane& p) {
  Plane out{p.width / 2, p.height / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out.v[static_cast<std::size_t>(y) * out.width + x] =
          0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) + p.at(2 * x + 1, 2 * y + 1));
  return out;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double centre = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

/// 'valid' separable correlation with a symmetric 1D kernel.
Plane filter_valid(const Plane& p, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = p.width - n + 1;
  const int oh = p.height - n + 1;
  Plane rows{ow, p.height, std::vector<double>(static_cast<std::size_t>(ow) * p.height)};
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[static_cast<std::size_t>(i)] * p.at(x + i, y);
      rows.v[static_cast<std::size_t>(y) * ow + x] = s;
    }
  Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[static_cast<std::size_t>(i)] * rows.at(x, y + i);
      out.v[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.width, a.height, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct ScaleStats {
  double mean_cs = 0.0;
  double mean_ssim = 0.0;
};

ScaleStats scale_stats(const Plane& a, const Plane& b, const std::vector<double>& kernel, double c1, double c2) {
  const Plane mu_a = filter_valid(a, kernel);
  const Plane mu_b = filter_valid(b, kernel);
  const Plane e_aa = filter_valid(product(a, a), kernel);
  const Plane e_bb = filter_valid(product(b, b), kernel);
  const Plane e_ab = filter_valid(product(a, b), kernel);

  double cs_sum = 0.0, ssim_sum = 0.0;
  for (std::size_t i = 0; i < mu_a.v.size(); ++i) {
    const double ma = mu_a.v[i], mb = mu_b.v[i];
    const double var_a = e_aa.v[i] - ma * ma;
    const double var_b = e_bb.v[i] - mb * mb;
    const double cov = e_ab.v[i] - ma * mb;
    const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
    const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const auto count = static_cast<double>(mu_a.v.size());
  return {cs_sum / count, ssim_sum / count};
}

/// Sign-preserving power, keeps the product defined for negative correlations.
double signed_pow(double v, double w) { return std::copysign(std::pow(std::fabs(v), w), v); }

constexpr std::array<double, 5> kScaleWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

double ms_ssim_plane(Plane a, Plane b, const MsSsimParams& params, int levels) {
  const auto kernel = gaussian_kernel(params.window, params.sigma);
  const double c1 = (params.k1 * 1.0) * (params.k1 * 1.0);
  const double c2 = (params.k2 * 1.0) * (params.k2 * 1.0);

  double weight_sum = 0.0;
  for (int j = 0; j < levels; ++j) weight_sum += kScaleWeights[static_cast<std::size_t>(j)];

  double result = 1.0;
  for (int j = 0; j < levels; ++j) {
    const double w = kScaleWeights[static_cast<std::size_t>(j)] / weight_sum;
    const ScaleStats s = scale_stats(a, b, kernel, c1, c2);
    if (j + 1 < levels) {
      result *= signed_pow(s.mean_cs, w);
      a = downsample(a);
      b = downsample(b);
    } else {
      result *= signed_pow(s.mean_ssim, w);
    }
  }
  return result;
}

}  // namespace

double mse(const ImageU8& a, const ImageU8& b) { return raster_mse(a, b, 1.0 / 255.0); }
double mse(const ImageF& a, const ImageF& b) { return raster_mse(a, b, 1.0); }

double mse(const MotionField& a, const MotionField& b) {
  require_same_shape(a, b, "mse");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double dx = static_cast<double>(a.data()[i].x) - b.data()[i].x;
    const double dy = static_cast<double>(a.data()[i].y) - b.data()[i].y;
    sum += dx * dx + dy * dy;
  }
  return sum / (2.0 * static_cast<double>(a.data().size()));
}

double psnr(const ImageU8& a, const ImageU8& b) { return psnr_from_mse(mse(a, b)); }
double psnr(const ImageF& a, const ImageF& b) { return psnr_from_mse(mse(a, b)); }

double aepe(const MotionField& f, const MotionField& g, const FluidMask* mask) {
  require_same_shape(f, g, "aepe");
  if (mask) require_same_shape(f, *mask, "aepe mask");

  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      if (mask && !mask->at(x, y)) continue;
      const double dx = static_cast<double>(f.at(x, y).x) - g.at(x, y).x;
      const double dy = static_cast<double>(f.at(x, y).y) - g.at(x, y).y;
      sum += std::hypot(dx, dy);
      ++count;
    }
  }
  if (count == 0) throw ArgumentError("aepe: mask selects no pixels");
  return sum / static_cast<double>(count);
}

int ms_ssim_levels(Extent extent, int window) {
  const int min_dim = std::min(extent.width, extent.height);
  if (min_dim < window)
    throw ArgumentError("ms_ssim: image " + to_string(extent) + " is smaller than the " + std::to_string(window) +
                        "-pixel window");
  int levels = 1;
  while (levels < 5 && min_dim >= window * (1 << levels)) ++levels;
  return levels;
}

double ms_ssim(const ImageF& a, const ImageF& b, const MsSsimParams& params) {
  require_same_shape(a, b, "ms_ssim");
  if (a.channels() != b.channels()) throw ArgumentError("ms_ssim: channel count mismatch");
  const int levels = ms_ssim_levels(a.extent(), params.window);

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c)
    total += ms_ssim_plane(extract_channel(a, c), extract_channel(b, c), params, levels);
  return total / a.channels();
}

double ms_ssim(const ImageU8& a, const ImageU8& b, const MsSsimParams& params) {
  return ms_ssim(to_float(a), to_float(b), params);
}

}  // namespace cinemaloop
