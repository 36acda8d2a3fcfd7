#pragma once

// Field and frame similarity metrics. 8-bit images are normalized to [0, 1]
// before any computation, so PSNR uses a data range of 1.

#include <optional>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

double mse(const ImageU8& a, const ImageU8& b);
double mse(const ImageF& a, const ImageF& b);
/// Mean over both components of every vector.
double mse(const MotionField& a, const MotionField& b);

/// 10 log10(1 / mse); +infinity for identical images.
double psnr(const ImageU8& a, const ImageU8& b);
double psnr(const ImageF& a, const ImageF& b);

/// Average end-point error, optionally restricted to a mask.
double aepe(const MotionField& f, const MotionField& g, const FluidMask* mask = nullptr);

struct MsSsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Number of scales used for an image of the given size (at most 5).
int ms_ssim_levels(Extent extent, int window = 11);

/// Multi-scale SSIM with 'valid' Gaussian windows and 2x2-mean
/// downsampling. Multi-channel images are averaged over channels. Images
/// too small for five scales use fewer, with renormalized weights.
double ms_ssim(const ImageF& a, const ImageF& b, const MsSsimParams& params = {});
double ms_ssim(const ImageU8& a, const ImageU8& b, const MsSsimParams& params = {});

}  // namespace cinemaloop
