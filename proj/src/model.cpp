#include "ctcbert/model.hpp"

#include "ctcbert/error.hpp"

#include <cmath>
#include <string>

namespace ctcbert {

std::string_view to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Tanh: return "tanh";
    case Nonlinearity::Relu: return "relu";
    case Nonlinearity::Identity: return "identity";
  }
  return "tanh";
}

Nonlinearity parse_nonlinearity(std::string_view name) {
  if (name == "tanh") return Nonlinearity::Tanh;
  if (name == "relu") return Nonlinearity::Relu;
  if (name == "identity") return Nonlinearity::Identity;
  throw Error(ErrorKind::ConfigInvalid, "unknown nonlinearity '" + std::string(name) + "'");
}

void validate(const ModelDims& dims) {
  require(dims.feature_dim >= 1 && dims.model_dim >= 1 && dims.embed_dim >= 1,
          ErrorKind::ConfigInvalid, "model dimensions must be positive");
  require(dims.vocab >= 1, ErrorKind::ConfigInvalid, "vocab must be >= 1");
  require(dims.layers >= 0 && dims.layers <= 4, ErrorKind::ConfigInvalid,
          "layers must lie in [0, 4]");
  require(dims.layers > 0 || dims.feature_dim == dims.model_dim, ErrorKind::ConfigInvalid,
          "a zero-layer encoder needs model_dim == feature_dim");
  require(dims.attention_window >= 0, ErrorKind::ConfigInvalid,
          "attention_window must be >= 0");
}

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Matrix affine_init(Eigen::Index out, Eigen::Index in, Rng& rng) {
  return uniform_matrix(out, in, 1.0 / std::sqrt(static_cast<double>(in)), rng);
}

Matrix activate(const Matrix& pre, Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Tanh: return pre.array().tanh().matrix();
    case Nonlinearity::Relu: return pre.cwiseMax(0.0);
    case Nonlinearity::Identity: return pre;
  }
  return pre;
}

// d act / d pre, elementwise, expressed through the stored activation.
Matrix activation_slope(const Matrix& pre, const Matrix& act, Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Tanh: return (1.0 - act.array().square()).matrix();
    case Nonlinearity::Relu: return (pre.array() > 0.0).cast<double>().matrix();
    case Nonlinearity::Identity: return Matrix::Ones(pre.rows(), pre.cols());
  }
  return Matrix::Ones(pre.rows(), pre.cols());
}

Matrix attention_probs(const Matrix& query, const Matrix& key, int window) {
  const Eigen::Index frames = query.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(query.cols()));
  Matrix scores = (query * key.transpose()) * scale;
  for (Eigen::Index i = 0; i < frames; ++i) {
    double max = kNegInf;
    for (Eigen::Index j = 0; j < frames; ++j) {
      if (window > 0 && std::abs(i - j) > window) {
        scores(i, j) = kNegInf;
      } else {
        max = std::max(max, scores(i, j));
      }
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < frames; ++j) {
      const double e = scores(i, j) == kNegInf ? 0.0 : std::exp(scores(i, j) - max);
      scores(i, j) = e;
      sum += e;
    }
    scores.row(i) /= sum;
  }
  return scores;
}

void append(std::vector<std::span<double>>& out, Matrix& m) {
  out.emplace_back(m.data(), static_cast<size_t>(m.size()));
}
void append(std::vector<std::span<double>>& out, Vector& v) {
  out.emplace_back(v.data(), static_cast<size_t>(v.size()));
}

template <class M>
std::vector<std::span<const double>> as_const(std::vector<std::span<double>> spans) {
  return {spans.begin(), spans.end()};
}

}  // namespace

Model init_model(const ModelDims& dims, Rng& rng) {
  validate(dims);
  Model model;
  model.dims = dims;
  model.encoder.nonlinearity = dims.nonlinearity;
  model.encoder.attention_window = dims.attention_window;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  model.encoder.mask_embedding.resize(dims.feature_dim);
  for (Eigen::Index i = 0; i < dims.feature_dim; ++i) model.encoder.mask_embedding[i] = unit(rng);

  for (int l = 0; l < dims.layers; ++l) {
    EncoderBlock block;
    const int in = l == 0 ? dims.feature_dim : dims.model_dim;
    block.weight = affine_init(dims.model_dim, in, rng);
    block.bias = Vector::Zero(dims.model_dim);
    if (dims.attention) {
      Attention att;
      att.query = affine_init(dims.model_dim, dims.model_dim, rng);
      att.key = affine_init(dims.model_dim, dims.model_dim, rng);
      att.value = affine_init(dims.model_dim, dims.model_dim, rng);
      block.attention = std::move(att);
    }
    model.encoder.blocks.push_back(std::move(block));
  }

  model.head.projection = affine_init(dims.embed_dim, dims.model_dim, rng);
  model.head.bias = Vector::Zero(dims.embed_dim);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(dims.embed_dim)));
  model.head.embeddings.resize(dims.vocab + 1, dims.embed_dim);
  for (Eigen::Index i = 0; i < model.head.embeddings.size(); ++i) {
    model.head.embeddings.data()[i] = gauss(rng);
  }
  return model;
}

EncoderTrace encoder_forward_traced(const Matrix& features, const EncoderParams& params) {
  EncoderTrace trace;
  Matrix current = features;
  for (const EncoderBlock& block : params.blocks) {
    require(current.cols() == block.weight.cols(), ErrorKind::DimensionMismatch,
            "encoder input width " + std::to_string(current.cols()) + " != expected " +
                std::to_string(block.weight.cols()));
    BlockTrace bt;
    bt.input = current;
    bt.pre = current * block.weight.transpose();
    bt.pre.rowwise() += block.bias.transpose();
    bt.act = activate(bt.pre, params.nonlinearity);
    current = bt.act;
    if (block.attention) {
      const Attention& att = *block.attention;
      bt.query = bt.act * att.query.transpose();
      bt.key = bt.act * att.key.transpose();
      bt.value = bt.act * att.value.transpose();
      bt.probs = attention_probs(bt.query, bt.key, params.attention_window);
      current += bt.probs * bt.value;
    }
    trace.blocks.push_back(std::move(bt));
  }
  if (params.blocks.empty()) {
    require(features.cols() == params.mask_embedding.size(), ErrorKind::DimensionMismatch,
            "feature width differs from the encoder input width");
  }
  trace.hidden = std::move(current);
  return trace;
}

Matrix encoder_forward(const Matrix& features, const EncoderParams& params) {
  return encoder_forward_traced(features, params).hidden;
}

Matrix encoder_backward(const EncoderTrace& trace, const EncoderParams& params,
                        const Matrix& d_hidden, EncoderParams& grad) {
  Matrix d_out = d_hidden;
  for (size_t l = params.blocks.size(); l-- > 0;) {
    const EncoderBlock& block = params.blocks[l];
    const BlockTrace& bt = trace.blocks[l];
    EncoderBlock& g = grad.blocks[l];

    Matrix d_act = d_out;
    if (block.attention) {
      const Attention& att = *block.attention;
      Attention& ga = *g.attention;
      const double scale = 1.0 / std::sqrt(static_cast<double>(bt.query.cols()));
      const Matrix d_probs = d_out * bt.value.transpose();
      const Matrix d_value = bt.probs.transpose() * d_out;
      const Vector row_dot = (bt.probs.array() * d_probs.array()).rowwise().sum();
      Matrix d_scores = bt.probs.array() * (d_probs.colwise() - row_dot).array();
      d_scores *= scale;
      const Matrix d_query = d_scores * bt.key;
      const Matrix d_key = d_scores.transpose() * bt.query;
      ga.query += d_query.transpose() * bt.act;
      ga.key += d_key.transpose() * bt.act;
      ga.value += d_value.transpose() * bt.act;
      d_act += d_query * att.query + d_key * att.key + d_value * att.value;
    }
    const Matrix d_pre =
        (d_act.array() * activation_slope(bt.pre, bt.act, params.nonlinearity).array()).matrix();
    g.weight += d_pre.transpose() * bt.input;
    g.bias += d_pre.colwise().sum().transpose();
    d_out = d_pre * block.weight;
  }
  return d_out;
}

Matrix compute_logits(const Matrix& hidden, const HeadParams& head) {
  require(hidden.cols() == head.projection.cols(), ErrorKind::DimensionMismatch,
          "hidden width differs from the projection input");
  Matrix projected = hidden * head.projection.transpose();
  projected.rowwise() += head.bias.transpose();
  return projected * head.embeddings.transpose();
}

Matrix head_backward(const Matrix& hidden, const HeadParams& head, const Matrix& d_logits,
                     HeadParams& grad) {
  Matrix projected = hidden * head.projection.transpose();
  projected.rowwise() += head.bias.transpose();
  grad.embeddings += d_logits.transpose() * projected;
  const Matrix d_projected = d_logits * head.embeddings;
  grad.projection += d_projected.transpose() * hidden;
  grad.bias += d_projected.colwise().sum().transpose();
  return d_projected * head.projection;
}

Matrix compute_logits(const Matrix& hidden, const AffineHead& head) {
  require(hidden.cols() == head.weight.cols(), ErrorKind::DimensionMismatch,
          "hidden width differs from the head input");
  Matrix logits = hidden * head.weight.transpose();
  logits.rowwise() += head.bias.transpose();
  return logits;
}

Matrix head_backward(const Matrix& hidden, const AffineHead& head, const Matrix& d_logits,
                     AffineHead& grad) {
  grad.weight += d_logits.transpose() * hidden;
  grad.bias += d_logits.colwise().sum().transpose();
  return d_logits * head.weight;
}

BlankParams extract_blank_params(const HeadParams& head) {
  const Eigen::Index blank = head.embeddings.rows() - 1;
  const Vector blank_embedding = head.embeddings.row(blank).transpose();
  BlankParams out;
  out.weight = head.projection.transpose() * blank_embedding;
  out.bias = head.bias.dot(blank_embedding);
  return out;
}

AffineHead init_finetune_head(int finetune_vocab, int model_dim,
                              const std::optional<BlankParams>& blank, Rng& rng) {
  require(finetune_vocab >= 1 && model_dim >= 1, ErrorKind::ConfigInvalid,
          "finetune head needs positive dimensions");
  AffineHead head;
  head.weight = affine_init(finetune_vocab + 1, model_dim, rng);
  head.bias = Vector::Zero(finetune_vocab + 1);
  if (blank) {
    require(blank->weight.size() == model_dim, ErrorKind::DimensionMismatch,
            "blank parameters have width " + std::to_string(blank->weight.size()) +
                ", model has " + std::to_string(model_dim));
    head.weight.row(finetune_vocab) = blank->weight.transpose();
    head.bias[finetune_vocab] = blank->bias;
  }
  return head;
}

std::vector<std::span<double>> blobs(EncoderParams& params) {
  std::vector<std::span<double>> out;
  append(out, params.mask_embedding);
  for (EncoderBlock& block : params.blocks) {
    append(out, block.weight);
    append(out, block.bias);
    if (block.attention) {
      append(out, block.attention->query);
      append(out, block.attention->key);
      append(out, block.attention->value);
    }
  }
  return out;
}

std::vector<std::span<double>> blobs(Model& model) {
  std::vector<std::span<double>> out = blobs(model.encoder);
  append(out, model.head.projection);
  append(out, model.head.bias);
  append(out, model.head.embeddings);
  return out;
}

std::vector<std::span<double>> blobs(FinetuneModel& model) {
  std::vector<std::span<double>> out = blobs(model.encoder);
  append(out, model.head.weight);
  append(out, model.head.bias);
  return out;
}

std::vector<std::span<const double>> blobs(const Model& model) {
  return as_const<Model>(blobs(const_cast<Model&>(model)));
}

std::vector<std::span<const double>> blobs(const FinetuneModel& model) {
  return as_const<FinetuneModel>(blobs(const_cast<FinetuneModel&>(model)));
}

std::size_t parameter_count(const Model& model) {
  std::size_t n = 0;
  for (auto b : blobs(model)) n += b.size();
  return n;
}

}  // namespace ctcbert
