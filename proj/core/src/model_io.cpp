#include <json.hpp>

#include "speccam/error.hpp"
#include "speccam/regression.hpp"

namespace speccam {

namespace {

using nlohmann::json;

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Svr: return "svr";
    case ModelKind::Knn: return "knn";
    case ModelKind::Rf: return "rf";
    case ModelKind::Hybrid: return "hybrid";
  }
  return "?";
}

ModelKind kind_from(const std::string& name) {
  if (name == "mlp") return ModelKind::Mlp;
  if (name == "svr") return ModelKind::Svr;
  if (name == "knn") return ModelKind::Knn;
  if (name == "rf") return ModelKind::Rf;
  if (name == "hybrid") return ModelKind::Hybrid;
  throw ProfileCorrupt("unknown model kind '" + name + "'");
}

json model_to_json(const TrainedModel& m) {
  json j;
  j["kind"] = kind_name(m.spec.kind);
  j["mode"] = m.mode == FeatureMode::Sal ? "sal" : "rgbl";
  j["seed"] = m.spec.seed;
  j["standardizer"] = {{"mean", m.standardizer.mean},
                       {"stddev", m.standardizer.stddev}};
  if (std::holds_alternative<MlpModel>(m.state)) {
    const auto& mlp = std::get<MlpModel>(m.state);
    j["y_mean"] = mlp.y_mean;
    j["y_std"] = mlp.y_std;
    j["input_dim"] = mlp.net.input_dim();
    j["layer_sizes"] = mlp.net.layer_sizes();
    j["weights"] = mlp.net.weights();
    j["biases"] = mlp.net.biases();
  } else if (std::holds_alternative<SvrModel>(m.state)) {
    const auto& svr = std::get<SvrModel>(m.state);
    j["y_mean"] = svr.y_mean;
    j["y_std"] = svr.y_std;
    j["gamma"] = svr.gamma;
    j["bias"] = svr.bias;
    j["beta"] = svr.beta;
    j["support_x"] = svr.support_x;
  } else if (std::holds_alternative<KnnModel>(m.state)) {
    const auto& knn = std::get<KnnModel>(m.state);
    j["k"] = knn.k;
    j["train_x"] = knn.train_x;
    j["train_y"] = knn.train_y;
  } else if (std::holds_alternative<RfModel>(m.state)) {
    const auto& rf = std::get<RfModel>(m.state);
    json trees = json::array();
    for (const auto& tree : rf.trees) {
      json nodes = json::array();
      for (const auto& n : tree)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  } else {
    const auto& h = std::get<HybridModel>(m.state);
    j["weights"] = h.weights;
    json bases = json::array();
    for (const auto& base : h.bases) bases.push_back(model_to_json(*base));
    j["bases"] = std::move(bases);
  }
  return j;
}

TrainedModel model_from_json(const json& j) {
  TrainedModel m;
  m.spec.kind = kind_from(j.at("kind").get<std::string>());
  m.mode = j.at("mode").get<std::string>() == "sal" ? FeatureMode::Sal
                                                    : FeatureMode::Rgbl;
  m.spec.seed = j.at("seed").get<std::uint64_t>();
  m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
  m.standardizer.stddev =
      j.at("standardizer").at("stddev").get<std::vector<double>>();
  switch (m.spec.kind) {
    case ModelKind::Mlp: {
      MlpModel mlp;
      mlp.y_mean = j.at("y_mean").get<double>();
      mlp.y_std = j.at("y_std").get<double>();
      mlp.net.set_layers(
          j.at("weights").get<std::vector<std::vector<double>>>(),
          j.at("biases").get<std::vector<std::vector<double>>>(),
          j.at("layer_sizes").get<std::vector<std::size_t>>(),
          j.at("input_dim").get<std::size_t>());
      m.state = std::move(mlp);
      break;
    }
    case ModelKind::Svr: {
      SvrModel svr;
      svr.y_mean = j.at("y_mean").get<double>();
      svr.y_std = j.at("y_std").get<double>();
      svr.gamma = j.at("gamma").get<double>();
      svr.bias = j.at("bias").get<double>();
      svr.beta = j.at("beta").get<std::vector<double>>();
      svr.support_x = j.at("support_x").get<std::vector<std::vector<double>>>();
      m.state = std::move(svr);
      break;
    }
    case ModelKind::Knn: {
      KnnModel knn;
      knn.k = j.at("k").get<int>();
      knn.train_x = j.at("train_x").get<std::vector<std::vector<double>>>();
      knn.train_y = j.at("train_y").get<std::vector<double>>();
      m.spec.knn.k = knn.k;
      m.state = std::move(knn);
      break;
    }
    case ModelKind::Rf: {
      RfModel rf;
      for (const auto& tree : j.at("trees")) {
        std::vector<TreeNode> nodes;
        nodes.reserve(tree.size());
        for (const auto& n : tree)
          nodes.push_back({n[0].get<int>(), n[1].get<double>(),
                           n[2].get<int>(), n[3].get<int>(),
                           n[4].get<double>()});
        rf.trees.push_back(std::move(nodes));
      }
      m.state = std::move(rf);
      break;
    }
    case ModelKind::Hybrid: {
      HybridModel h;
      const auto w = j.at("weights").get<std::vector<double>>();
      if (w.size() != 4) throw ProfileCorrupt("hybrid expects 4 weights");
      for (int i = 0; i < 4; ++i) h.weights[i] = w[i];
      for (const auto& base : j.at("bases"))
        h.bases.push_back(
            std::make_shared<TrainedModel>(model_from_json(base)));
      m.state = std::move(h);
      break;
    }
  }
  return m;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  return model_to_json(model).dump(2);
}

TrainedModel deserialize_model(const std::string& text) {
  try {
    return model_from_json(json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ProfileCorrupt(std::string("model file: ") + e.what());
  }
}

}  // namespace speccam
