#include "ctcbert/checkpoint.hpp"

#include "binary_io.hpp"

#include <string>

namespace ctcbert {

namespace {

constexpr std::string_view kCheckpointMagic = "CBCK";
constexpr std::string_view kBlankMagic = "CBBK";

std::uint32_t nonlinearity_code(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Tanh: return 0;
    case Nonlinearity::Relu: return 1;
    case Nonlinearity::Identity: return 2;
  }
  return 0;
}

Nonlinearity nonlinearity_from_code(std::uint32_t code) {
  switch (code) {
    case 0: return Nonlinearity::Tanh;
    case 1: return Nonlinearity::Relu;
    case 2: return Nonlinearity::Identity;
    default: throw Error(ErrorKind::VersionMismatch, "unknown nonlinearity code in checkpoint");
  }
}

void write_header(detail::BinaryWriter& w, HeadKind kind, const ModelDims& dims,
                  std::uint64_t params) {
  w.magic(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(dims.feature_dim));
  w.u32(static_cast<std::uint32_t>(dims.model_dim));
  w.u32(kind == HeadKind::EmbeddingSimilarity ? static_cast<std::uint32_t>(dims.embed_dim) : 0);
  w.u32(static_cast<std::uint32_t>(dims.vocab));
  w.u32(static_cast<std::uint32_t>(dims.layers));
  w.u32(static_cast<std::uint32_t>(kind));
  w.u32(dims.attention ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(dims.attention_window));
  w.u32(nonlinearity_code(dims.nonlinearity));
  w.u32(static_cast<std::uint32_t>(params));
}

template <class M>
void write_model(const std::filesystem::path& path, const M& model, HeadKind kind) {
  std::uint64_t params = 0;
  for (auto b : blobs(model)) params += b.size();
  detail::BinaryWriter w(path);
  write_header(w, kind, model.dims, params);
  for (auto b : blobs(model)) {
    for (double v : b) w.f32(static_cast<float>(v));
  }
  w.finish();
}

// Builds a zero-initialized model of the declared shape to receive blobs.
EncoderParams shaped_encoder(const ModelDims& dims) {
  EncoderParams enc;
  enc.nonlinearity = dims.nonlinearity;
  enc.attention_window = dims.attention_window;
  enc.mask_embedding = Vector::Zero(dims.feature_dim);
  for (int l = 0; l < dims.layers; ++l) {
    EncoderBlock block;
    block.weight = Matrix::Zero(dims.model_dim, l == 0 ? dims.feature_dim : dims.model_dim);
    block.bias = Vector::Zero(dims.model_dim);
    if (dims.attention) {
      const Matrix z = Matrix::Zero(dims.model_dim, dims.model_dim);
      block.attention = Attention{z, z, z};
    }
    enc.blocks.push_back(std::move(block));
  }
  return enc;
}

template <class M>
void read_blobs(detail::BinaryReader& r, M& model, std::uint32_t declared) {
  std::uint64_t expected = 0;
  for (auto b : blobs(model)) expected += b.size();
  require(expected == declared, ErrorKind::VersionMismatch,
          "checkpoint parameter count " + std::to_string(declared) +
              " does not match its header dimensions (" + std::to_string(expected) + ")");
  for (std::span<double> b : blobs(model)) {
    for (double& v : b) v = r.f32();
  }
  r.expect_end();
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Model& model) {
  write_model(path, model, HeadKind::EmbeddingSimilarity);
}

void write_checkpoint(const std::filesystem::path& path, const FinetuneModel& model) {
  write_model(path, model, HeadKind::DirectAffine);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  detail::BinaryReader r(path);
  r.expect_magic(kCheckpointMagic);
  const std::uint32_t version = r.u32();
  require(version == kCheckpointVersion, ErrorKind::VersionMismatch,
          "checkpoint version " + std::to_string(version) + " unsupported");
  ModelDims dims;
  dims.feature_dim = static_cast<int>(r.u32());
  dims.model_dim = static_cast<int>(r.u32());
  dims.embed_dim = static_cast<int>(r.u32());
  dims.vocab = static_cast<int>(r.u32());
  dims.layers = static_cast<int>(r.u32());
  const std::uint32_t kind = r.u32();
  dims.attention = r.u32() != 0;
  dims.attention_window = static_cast<int>(r.u32());
  dims.nonlinearity = nonlinearity_from_code(r.u32());
  const std::uint32_t params = r.u32();

  if (kind == static_cast<std::uint32_t>(HeadKind::EmbeddingSimilarity)) {
    validate(dims);
    Model model;
    model.dims = dims;
    model.encoder = shaped_encoder(dims);
    model.head.projection = Matrix::Zero(dims.embed_dim, dims.model_dim);
    model.head.bias = Vector::Zero(dims.embed_dim);
    model.head.embeddings = Matrix::Zero(dims.vocab + 1, dims.embed_dim);
    read_blobs(r, model, params);
    return model;
  }
  require(kind == static_cast<std::uint32_t>(HeadKind::DirectAffine), ErrorKind::VersionMismatch,
          "unknown head kind " + std::to_string(kind));
  dims.embed_dim = 1;
  validate(dims);
  dims.embed_dim = 0;
  FinetuneModel model;
  model.dims = dims;
  model.encoder = shaped_encoder(dims);
  model.head.weight = Matrix::Zero(dims.vocab + 1, dims.model_dim);
  model.head.bias = Vector::Zero(dims.vocab + 1);
  read_blobs(r, model, params);
  return model;
}

Model read_pretrained(const std::filesystem::path& path) {
  Checkpoint ckpt = read_checkpoint(path);
  require(std::holds_alternative<Model>(ckpt), ErrorKind::ConfigInvalid,
          "'" + path.string() + "' holds a finetuned model, not a pretrained one");
  return std::get<Model>(std::move(ckpt));
}

void write_blank_params(const std::filesystem::path& path, const BlankParams& blank) {
  detail::BinaryWriter w(path);
  w.magic(kBlankMagic);
  w.u32(kBlankFileVersion);
  w.u32(static_cast<std::uint32_t>(blank.weight.size()));
  for (Eigen::Index i = 0; i < blank.weight.size(); ++i) w.f64(blank.weight[i]);
  w.f64(blank.bias);
  w.finish();
}

BlankParams read_blank_params(const std::filesystem::path& path) {
  detail::BinaryReader r(path);
  r.expect_magic(kBlankMagic);
  const std::uint32_t version = r.u32();
  require(version == kBlankFileVersion, ErrorKind::VersionMismatch,
          "blank parameter file version " + std::to_string(version) + " unsupported");
  const std::uint32_t width = r.u32();
  require(width >= 1 && width <= (1u << 20), ErrorKind::VersionMismatch,
          "blank parameter file declares an implausible width");
  BlankParams blank;
  blank.weight.resize(width);
  for (Eigen::Index i = 0; i < blank.weight.size(); ++i) blank.weight[i] = r.f64();
  blank.bias = r.f64();
  r.expect_end();
  return blank;
}

}  // namespace ctcbert
