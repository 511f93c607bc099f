#pragma once

#include <cstdint>
#include <utility>

#include "vpip/image.hpp"

namespace vpip {

// ---- restoration degradations ------------------------------------------

Image apply_gaussian_noise(const Image& img, double sigma, uint64_t seed);
Image apply_poisson_noise(const Image& img, double peak, uint64_t seed);
Image apply_salt_pepper(const Image& img, double p, uint64_t seed);

// Separable convolution with a normalized Gaussian kernel, reflect padding.
Image apply_gaussian_blur(const Image& img, double sigma, int ksize);

// In-repo 8x8 block-DCT codec simulation (Annex-K quality scaling).
Image apply_jpeg_like(const Image& img, int quality);

// Ideal low-pass in the 2-D Fourier domain; cutoff is the fraction of the
// per-axis Nyquist frequency kept (normalized radius = max-norm).
Image apply_ringing(const Image& img, double cutoff);

// Blur with a Gaussian PSF, then run Richardson-Lucy deconvolution for the
// given iteration count; the over-sharpening residue is the degradation.
Image apply_rl_artifact(const Image& img, double psf_sigma, int iters);

Image apply_pixelation(const Image& img, int factor);

// Returns (degraded image, binary mask). Masked pixels are set to 0.5.
std::pair<Image, Image> apply_inpaint_mask(const Image& img, double coverage, uint64_t seed);

Image apply_rain_streaks(const Image& img, double density, double angle_deg, uint64_t seed);

// ---- enhancement distortions -------------------------------------------

enum class ToneKind { brightness, contrast, saturation, gamma };

Image adjust_tone(const Image& img, ToneKind kind, double factor);
ToneKind tone_kind_from_name(const std::string& name);

Image hist_equalize(const Image& img);

// ---- stylization ---------------------------------------------------------

Image stylize_pencil(const Image& img, double blur_sigma);
Image stylize_cartoon(const Image& img, int levels, int smooth_iters);

// ---- feature extraction ----------------------------------------------------

Image edge_canny(const Image& img, double low, double high);
Image edge_laplacian(const Image& img);

// Gaussian kernel helper shared with tests.
std::vector<double> gaussian_kernel(double sigma, int ksize);

}  // namespace vpip
