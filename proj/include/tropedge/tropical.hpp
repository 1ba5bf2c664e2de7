#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tropedge/image.hpp"

namespace tropedge {

/// (min, +) or (max, +). Convolution over a semiring replaces the sum with
/// min/max and the product with addition.
enum class Semiring { MinPlus, MaxPlus };

/// Named, ordered set of equally sized kernels.
class KernelBank {
 public:
  KernelBank(std::string name, std::vector<Kernel> kernels);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Kernel>& kernels() const noexcept { return kernels_; }
  std::size_t size() const noexcept { return kernels_.size(); }

  bool operator==(const KernelBank&) const = default;

 private:
  std::string name_;
  std::vector<Kernel> kernels_;
};

// All convolutions use cross-correlation orientation: the kernel cell at
// offset (i, j) from the anchor multiplies (or is added to) the pixel at
// (row + i, col + j). The kernel is never flipped.

Image classical_convolve(const Image& img, const Kernel& kernel,
                         PaddingMode border = PaddingMode::Replicate);

Image tropical_convolve(const Image& img, const Kernel& kernel, Semiring semiring,
                        PaddingMode border = PaddingMode::Replicate);

/// Element-wise min of the forward row difference I(r+1,c) - I(r,c) and the
/// forward column difference I(r,c+1) - I(r,c). The row-difference grid gets a
/// zero last row and the column-difference grid a zero last column before the
/// min is taken, so the result has the input's dimensions.
Image tropical_gradient(const Image& img);

/// Tropical response of every kernel in the bank, fused element-wise with max
/// (MaxPlus) or min (MinPlus).
Image fuse_bank(const Image& img, const KernelBank& bank, Semiring semiring,
                PaddingMode border = PaddingMode::Replicate);

namespace banks {

/// Eight 3x3 directional masks, ordered 0, 90, 180, 270, 45, 135, 225, 315 deg.
KernelBank directional8();
/// Reconstructed six-mask bank: the directional masks at 0, 45, 90, 135, 180
/// and 270 degrees.
KernelBank directional6();
/// The four masks h1..h4 fused with max-plus in the 4-kernel variant.
KernelBank hessian4();

/// directional8 | directional6 | hessian4
KernelBank by_name(std::string_view name);

}  // namespace banks

/// Parses a kernel file: one kernel per block of rows of whitespace separated
/// reals, blocks separated by blank lines. '#' starts a comment.
KernelBank parse_kernel_bank(std::string_view text, std::string name);

/// Loads a kernel file; the bank is named after the file stem.
KernelBank load_kernel_bank(const std::filesystem::path& path);

}  // namespace tropedge
