#pragma once

#include <vector>

#include "pn2n/image.hpp"
#include "pn2n/nn/tensor.hpp"

namespace pn2n {

// Reflect (ping-pong) padding on the bottom/right edges up to a multiple of
// `divisor`; the valid region stays at the origin.
Image pad_to_multiple(const Image& img, int divisor);

// Stack images (all same size) into an N x 1 x H x W float tensor.
nn::Tensor<float> batch_to_tensor(const std::vector<const Image*>& images);

// Extract batch item `index` back into an Image, optionally cropped.
Image tensor_to_image(const nn::Tensor<float>& t, int index, int crop_h = 0, int crop_w = 0);

}  // namespace pn2n
