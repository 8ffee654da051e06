#include "champ/dataset.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>

#include "champ/errors.hpp"

namespace champ {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class BigEndianReader {
 public:
  BigEndianReader(const std::vector<unsigned char>& buf, std::string name)
      : buf_(buf), name_(std::move(name)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | buf_[pos_++];
    return v;
  }

  const unsigned char* take(std::size_t n) {
    need(n);
    const auto* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::size_t offset() const noexcept { return pos_; }
  const std::string& name() const noexcept { return name_; }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) {
      throw FormatError(name_ + ": truncated, needed " + std::to_string(n) + " more bytes", pos_);
    }
  }

  const std::vector<unsigned char>& buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

void put_u32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

MnistSet load_mnist_idx(const std::filesystem::path& image_path, const std::filesystem::path& label_path) {
  const auto image_bytes = read_file(image_path);
  const auto label_bytes = read_file(label_path);

  BigEndianReader img(image_bytes, image_path.filename().string());
  if (const auto magic = img.u32(); magic != kIdxImageMagic) {
    throw FormatError(img.name() + ": bad magic " + std::to_string(magic) + ", expected 2051", 0);
  }
  const auto count = img.u32();
  const auto rows = img.u32();
  const auto cols = img.u32();
  if (rows != kImageSide || cols != kImageSide) {
    throw FormatError(img.name() + ": images are " + std::to_string(rows) + "x" + std::to_string(cols) +
                          ", expected 28x28",
                      8);
  }

  BigEndianReader lab(label_bytes, label_path.filename().string());
  if (const auto magic = lab.u32(); magic != kIdxLabelMagic) {
    throw FormatError(lab.name() + ": bad magic " + std::to_string(magic) + ", expected 2049", 0);
  }
  const auto label_count = lab.u32();
  if (label_count != count) {
    throw FormatError(lab.name() + ": " + std::to_string(label_count) + " labels for " +
                          std::to_string(count) + " images",
                      4);
  }

  MnistSet set;
  set.images.resize(count);
  set.labels.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto* p = img.take(set.images[i].pixels.size());
    std::copy(p, p + set.images[i].pixels.size(), set.images[i].pixels.begin());
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto at = lab.offset();
    const int v = *lab.take(1);
    if (v > 9) throw FormatError(lab.name() + ": label " + std::to_string(v) + " out of range", at);
    set.labels[i] = v;
  }
  return set;
}

void write_idx_images(const std::filesystem::path& path, const std::vector<RawImage>& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  put_u32(out, kIdxImageMagic);
  put_u32(out, static_cast<std::uint32_t>(images.size()));
  put_u32(out, kImageSide);
  put_u32(out, kImageSide);
  for (const auto& im : images) {
    out.write(reinterpret_cast<const char*>(im.pixels.data()), static_cast<std::streamsize>(im.pixels.size()));
  }
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  put_u32(out, kIdxLabelMagic);
  put_u32(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) out.put(static_cast<char>(l));
}

ComplexVector fft_block(const RawImage& img) {
  constexpr int n = kImageSide;
  fftw_complex* buf = fftw_alloc_complex(n * n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (int i = 0; i < n * n; ++i) {
    buf[i][0] = img.pixels[i] / 255.0;
    buf[i][1] = 0.0;
  }
  fftw_execute(plan);
  ComplexVector block(kFeatureLength);
  for (int r = 0; r < kFeatureSide; ++r) {
    for (int c = 0; c < kFeatureSide; ++c) {
      const auto& v = buf[r * n + c];
      block(r * kFeatureSide + c) = Complex{v[0], v[1]};
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return block;
}

ComplexVector fft_features(const RawImage& img) {
  ComplexVector f = fft_block(img);
  const double peak = f.cwiseAbs().maxCoeff();
  if (peak > 0.0) f /= peak;
  return f;
}

Dataset mnist_features(const MnistSet& set) {
  Dataset d;
  d.features.reserve(set.images.size());
  for (const auto& im : set.images) d.features.push_back(fft_features(im));
  d.labels = set.labels;
  return d;
}

Dataset synth_dataset(int classes, int per_class, int dim, std::uint64_t seed, double noise) {
  if (classes < 1 || per_class < 1 || dim < 1) {
    throw std::invalid_argument("synth_dataset: classes, per_class and dim must be >= 1");
  }
  if (!(noise >= 0.0)) throw std::invalid_argument("synth_dataset: noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<ComplexVector> centroids(static_cast<std::size_t>(classes), ComplexVector(dim));
  for (auto& c : centroids) {
    for (int k = 0; k < dim; ++k) c(k) = std::polar(1.0, angle(rng));
  }
  Dataset d;
  d.features.reserve(static_cast<std::size_t>(classes) * per_class);
  for (int i = 0; i < per_class; ++i) {
    for (int label = 0; label < classes; ++label) {
      ComplexVector x = centroids[label];
      for (int k = 0; k < dim; ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        x(k) += noise * Complex{re, im};
      }
      d.features.push_back(std::move(x));
      d.labels.push_back(label);
    }
  }
  return d;
}

}  // namespace champ
