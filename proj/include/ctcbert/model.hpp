#pragma once

#include "ctcbert/masking.hpp"
#include "ctcbert/numerics.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ctcbert {

enum class Nonlinearity { Tanh, Relu, Identity };

std::string_view to_string(Nonlinearity n);
Nonlinearity parse_nonlinearity(std::string_view name);

struct ModelDims {
  int feature_dim = 16;
  int model_dim = 32;
  int embed_dim = 16;
  int vocab = 20;  // pseudo-label classes, blank excluded
  int layers = 2;
  bool attention = true;
  int attention_window = 4;  // radius |i - j| <= window; 0 means unrestricted
  Nonlinearity nonlinearity = Nonlinearity::Tanh;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// Single-head scaled dot-product self-attention, each matrix model_dim^2.
struct Attention {
  Matrix query;
  Matrix key;
  Matrix value;
};

struct EncoderBlock {
  Matrix weight;  // out x in
  Vector bias;
  std::optional<Attention> attention;
};

/// Affine -> nonlinearity -> optional residual self-attention, per block.
/// With zero blocks the encoder is the identity map.
struct EncoderParams {
  Vector mask_embedding;
  std::vector<EncoderBlock> blocks;
  Nonlinearity nonlinearity = Nonlinearity::Tanh;
  int attention_window = 0;
};

/// logits_k(h) = E_k . (W_p h + b_p); row V of `embeddings` is the blank E_b.
struct HeadParams {
  Matrix projection;  // d_embed x d_model
  Vector bias;        // d_embed
  Matrix embeddings;  // (V+1) x d_embed
};

struct Model {
  ModelDims dims;
  EncoderParams encoder;
  HeadParams head;
};

/// Effective direct-affine row of the blank class: W_b = W_p^T E_b, b_b = b_p . E_b.
struct BlankParams {
  Vector weight;  // d_model
  double bias = 0.0;
};

/// Direct affine output layer used for finetuning; row V' is the blank.
struct AffineHead {
  Matrix weight;  // (V'+1) x d_model
  Vector bias;
};

struct FinetuneModel {
  ModelDims dims;  // vocab holds V'
  EncoderParams encoder;
  AffineHead head;
};

void validate(const ModelDims& dims);

/// Uniform(+-1/sqrt(fan_in)) affine weights, zero biases,
/// N(0, 1/d_embed) embeddings, Uniform[0, 1) mask embedding.
Model init_model(const ModelDims& dims, Rng& rng);

struct BlockTrace {
  Matrix input;
  Matrix pre;
  Matrix act;
  Matrix query, key, value, probs;
};

struct EncoderTrace {
  std::vector<BlockTrace> blocks;
  Matrix hidden;
};

Matrix encoder_forward(const Matrix& features, const EncoderParams& params);
EncoderTrace encoder_forward_traced(const Matrix& features, const EncoderParams& params);

/// Accumulates parameter gradients into `grad` (same shapes as `params`) and
/// returns d loss / d features. The mask embedding gradient is left to the caller.
Matrix encoder_backward(const EncoderTrace& trace, const EncoderParams& params,
                        const Matrix& d_hidden, EncoderParams& grad);

Matrix compute_logits(const Matrix& hidden, const HeadParams& head);
Matrix head_backward(const Matrix& hidden, const HeadParams& head, const Matrix& d_logits,
                     HeadParams& grad);

Matrix compute_logits(const Matrix& hidden, const AffineHead& head);
Matrix head_backward(const Matrix& hidden, const AffineHead& head, const Matrix& d_logits,
                     AffineHead& grad);

BlankParams extract_blank_params(const HeadParams& head);

/// Fresh (V'+1) x d_model head; when `blank` is given its row/bias replace
/// the sampled blank row. The same rng stream is consumed either way.
AffineHead init_finetune_head(int finetune_vocab, int model_dim,
                              const std::optional<BlankParams>& blank, Rng& rng);

/// Parameter blobs in checkpoint order.
std::vector<std::span<double>> blobs(EncoderParams& params);
std::vector<std::span<double>> blobs(Model& model);
std::vector<std::span<double>> blobs(FinetuneModel& model);
std::vector<std::span<const double>> blobs(const Model& model);
std::vector<std::span<const double>> blobs(const FinetuneModel& model);

std::size_t parameter_count(const Model& model);

template <class M>
M zeros_like(const M& m) {
  M z = m;
  for (std::span<double> b : blobs(z)) std::fill(b.begin(), b.end(), 0.0);
  return z;
}

}  // namespace ctcbert
