#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tinyol/frozen_model.hpp"
#include "tinyol/online_head.hpp"

namespace tinyol {

// Little-endian binary containers.
//
// Model ("TOLM"): magic, u8 version=1, u8 layer_count, u8 embedding_index,
//   u8 reserved=0; per layer: u16 in_dim, u16 out_dim, u8 activation,
//   f32 weights row-major (out*in), f32 biases (out).
// Preproc ("TOLP"): magic, u8 version=1, 3x f32 pca_mean, 3x f32 pca_axis,
//   f32 minmax_lo, f32 minmax_hi.
// Head ("TOLH"): magic, u8 version=1, u8 kind (0=regression, 1=softmax);
//   regression: u16 out_dim, u16 in_dim; softmax: u8 k, u8 d;
//   then f32 alpha, f32 W row-major, f32 b.

std::vector<std::uint8_t> save_model(const FrozenModel& m);
FrozenModel load_model(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> save_preproc(const Preproc& p);
Preproc load_preproc(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> save_head(const RegressionHead& h);
std::vector<std::uint8_t> save_head(const SoftmaxHead& h);
RegressionHead load_regression_head(const std::vector<std::uint8_t>& bytes,
                                    GradRule rule = GradRule::Bce);
SoftmaxHead load_softmax_head(const std::vector<std::uint8_t>& bytes);

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

}  // namespace tinyol
