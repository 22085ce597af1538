#include "pinn/model.hpp"

#include <fstream>

#include "pinn/errors.hpp"

namespace pinn {

InputMap InputMap::identity(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

InputMap InputMap::to_symmetric_cube(const Box& box) {
  InputMap m{Eigen::VectorXd(box.dim()), Eigen::VectorXd(box.dim())};
  for (int a = 0; a < box.dim(); ++a) {
    m.shift(a) = 0.5 * (box.lo[a] + box.hi[a]);
    m.scale(a) = 2.0 / box.extent(a);
  }
  return m;
}

Model::Model(NetworkParams p, InputMap m) : params(std::move(p)), input(std::move(m)) {
  if (input.dim() != params.input_dim() || input.scale.size() != input.shift.size())
    throw ShapeError("input map does not match network input dimension");
}

Eigen::MatrixXd Model::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
  if (points.rows() != input_dim()) throw ShapeError("points do not match model input dimension");
  Eigen::MatrixXd z = (points.colwise() - input.shift).array().colwise() * input.scale.array();
  return forward_batch(params, z);
}

Jet Model::jet(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != input_dim()) throw ShapeError("point does not match model input dimension");
  std::vector<double> z(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) z[a] = (y[a] - input.shift(a)) * input.scale(a);
  Jet j = forward_jet(params, z);
  for (int a = 0; a < input_dim(); ++a) {
    j.grad.col(a) *= input.scale(a);
    j.hess_diag.col(a) *= input.scale(a) * input.scale(a);
  }
  return j;
}

Eigen::MatrixXd ModelTape::normalize(const InputMap& m, const Eigen::Ref<const Eigen::MatrixXd>& pts) {
  if (pts.rows() != m.dim()) throw ShapeError("points do not match model input dimension");
  return (pts.colwise() - m.shift).array().colwise() * m.scale.array();
}

ModelTape::ModelTape(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& points,
                     const JetRequest& request)
    : model_(&model), tape_(model.params, normalize(model.input, points), request) {
  out_ = tape_.outputs();
  const Eigen::VectorXd& s = model.input.scale;
  for (std::size_t j = 0; j < out_.grad.size(); ++j)
    if (out_.grad[j].size() > 0) out_.grad[j] *= s(j);
  for (std::size_t j = 0; j < out_.hess.size(); ++j)
    if (out_.hess[j].size() > 0) out_.hess[j] *= s(j) * s(j);
}

void ModelTape::backward(const JetBatch& adjoint, std::span<double> grad) const {
  const Eigen::VectorXd& s = model_->input.scale;
  JetBatch scaled = adjoint;
  for (std::size_t j = 0; j < scaled.grad.size(); ++j)
    if (scaled.grad[j].size() > 0) scaled.grad[j] *= s(j);
  for (std::size_t j = 0; j < scaled.hess.size(); ++j)
    if (scaled.hess[j].size() > 0) scaled.hess[j] *= s(j) * s(j);
  tape_.backward(scaled, grad);
}

nlohmann::json checkpoint_to_json(const Model& model, const nlohmann::json& problem) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["layer_dims"] = model.params.layer_dims();
  j["activation"] = std::string(to_string(model.params.activation()));
  const auto flat = model.params.flat();
  j["flat_params"] = std::vector<double>(flat.begin(), flat.end());
  j["input_shift"] = std::vector<double>(model.input.shift.data(),
                                         model.input.shift.data() + model.input.shift.size());
  j["input_scale"] = std::vector<double>(model.input.scale.data(),
                                         model.input.scale.data() + model.input.scale.size());
  j["problem"] = problem;
  return j;
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(name, "missing field");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(name, e.what());
  }
}

}  // namespace

Model checkpoint_from_json(const nlohmann::json& j, nlohmann::json* problem) {
  if (!j.is_object()) throw ConfigError("", "checkpoint is not a JSON object");
  const int version = field<int>(j, "version");
  if (version != kCheckpointVersion)
    throw ConfigError("version", "unknown checkpoint version " + std::to_string(version));
  auto dims = field<std::vector<int>>(j, "layer_dims");
  Activation act;
  try {
    act = activation_from_string(field<std::string>(j, "activation"));
  } catch (const ArchitectureError& e) {
    throw ConfigError("activation", e.what());
  }
  const auto flat = field<std::vector<double>>(j, "flat_params");
  const std::size_t expected = parameter_count(dims);
  if (flat.size() != expected)
    throw ConfigError("flat_params", "expected " + std::to_string(expected) + " values, got " +
                                         std::to_string(flat.size()));
  NetworkParams params(dims, act, flat);
  InputMap map = InputMap::identity(params.input_dim());
  if (j.contains("input_shift")) {
    const auto sh = field<std::vector<double>>(j, "input_shift");
    const auto sc = field<std::vector<double>>(j, "input_scale");
    if (static_cast<int>(sh.size()) != params.input_dim() || sc.size() != sh.size())
      throw ConfigError("input_shift", "length does not match the input dimension");
    map.shift = Eigen::Map<const Eigen::VectorXd>(sh.data(), sh.size());
    map.scale = Eigen::Map<const Eigen::VectorXd>(sc.data(), sc.size());
  }
  if (problem) *problem = j.value("problem", nlohmann::json::object());
  return Model(std::move(params), std::move(map));
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const nlohmann::json& problem) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string(), "cannot open for writing");
  out << checkpoint_to_json(model, problem).dump(1) << "\n";
}

Model load_checkpoint(const std::filesystem::path& path, nlohmann::json* problem) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open checkpoint");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string(), e.what());
  }
  return checkpoint_from_json(j, problem);
}

}  // namespace pinn
