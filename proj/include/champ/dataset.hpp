#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "champ/linalg.hpp"

namespace champ {

/// Complex feature vectors of uniform length with integer class labels.
struct Dataset {
  std::vector<ComplexVector> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  int feature_dim() const noexcept {
    return features.empty() ? 0 : static_cast<int>(features.front().size());
  }
};

/// Throws std::invalid_argument when the lists differ in length or the
/// feature lengths are not uniform.
void validate_dataset(const Dataset& data);

inline constexpr int kImageSide = 28;
inline constexpr int kFeatureSide = 8;
inline constexpr int kFeatureLength = kFeatureSide * kFeatureSide;

/// 28×28 grayscale image, row-major.
struct RawImage {
  std::array<std::uint8_t, kImageSide * kImageSide> pixels{};

  std::uint8_t at(int row, int col) const { return pixels[row * kImageSide + col]; }
  std::uint8_t& at(int row, int col) { return pixels[row * kImageSide + col]; }
};

struct MnistSet {
  std::vector<RawImage> images;
  std::vector<int> labels;
};

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;

/// Parses a big-endian IDX image/label file pair. Throws DataError if a file
/// cannot be opened and FormatError on a bad magic, wrong image shape,
/// truncation or mismatched counts.
MnistSet load_mnist_idx(const std::filesystem::path& image_path,
                        const std::filesystem::path& label_path);

/// Writers for the same format (tests and fixtures).
void write_idx_images(const std::filesystem::path& path, const std::vector<RawImage>& images);
void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// Low-frequency 8×8 block (DC at [0,0]) of the 2-D DFT of the image scaled
/// to [0,1], before normalization. Row-major, length 64.
ComplexVector fft_block(const RawImage& img);

/// fft_block divided by its largest modulus (zeros stay zeros).
ComplexVector fft_features(const RawImage& img);

Dataset mnist_features(const MnistSet& set);

/// Complex Gaussian blobs: class centroids have unit-modulus entries with
/// random phases; each item adds circular complex noise with per-component
/// standard deviation `noise`. Items are interleaved by class.
Dataset synth_dataset(int classes, int per_class, int dim, std::uint64_t seed, double noise = 0.1);

}  // namespace champ
