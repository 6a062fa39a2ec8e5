#include <fstream>

#include <json.hpp>

#include "adspeech/error.hpp"
#include "adspeech/models.hpp"

namespace adspeech {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json config_to_json(const ModelConfig& c) {
  return json{{"kind", model_kind_name(c.kind)},
              {"seed", c.seed},
              {"trees", c.trees},
              {"max_depth", c.max_depth},
              {"min_split", c.min_split},
              {"mtry", c.mtry},
              {"bootstrap", c.bootstrap},
              {"k", c.k},
              {"c", c.c},
              {"degree", c.degree},
              {"coef0", c.coef0},
              {"tol", c.tol},
              {"epsilon", c.epsilon},
              {"max_passes", c.max_passes},
              {"max_iter", c.max_iter},
              {"hidden", c.hidden},
              {"lr", c.lr},
              {"momentum", c.momentum},
              {"epochs", c.epochs},
              {"lr0", c.lr0},
              {"l2", c.l2},
              {"sgd_epochs", c.sgd_epochs}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  const std::string kind = j.at("kind");
  bool found = false;
  for (ModelKind k : {ModelKind::rf_class, ModelKind::rf_reg, ModelKind::knn,
                      ModelKind::svm_smo, ModelKind::svr_smo, ModelKind::mlp_class,
                      ModelKind::mlp_reg, ModelKind::linreg_sgd}) {
    if (model_kind_name(k) == kind) {
      c.kind = k;
      found = true;
    }
  }
  if (!found) throw DataError("model file: unknown kind " + kind);
  c.seed = j.at("seed");
  c.trees = j.at("trees");
  c.max_depth = j.at("max_depth");
  c.min_split = j.at("min_split");
  c.mtry = j.at("mtry");
  c.bootstrap = j.at("bootstrap");
  c.k = j.at("k");
  c.c = j.at("c");
  c.degree = j.at("degree");
  c.coef0 = j.at("coef0");
  c.tol = j.at("tol");
  c.epsilon = j.at("epsilon");
  c.max_passes = j.at("max_passes");
  c.max_iter = j.at("max_iter");
  c.hidden = j.at("hidden");
  c.lr = j.at("lr");
  c.momentum = j.at("momentum");
  c.epochs = j.at("epochs");
  c.lr0 = j.at("lr0");
  c.l2 = j.at("l2");
  c.sgd_epochs = j.at("sgd_epochs");
  return c;
}

json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const TreeNode& n : t.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  }
  return nodes;
}

Tree tree_from_json(const json& j) {
  Tree t;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0);
    node.threshold = n.at(1);
    node.left = n.at(2);
    node.right = n.at(3);
    node.value = n.at(4);
    t.nodes.push_back(node);
  }
  return t;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path,
                const std::string& header_comment) {
  json j;
  j["format_version"] = kFormatVersion;
  j["header"] = header_comment;
  j["config"] = config_to_json(model.config);
  j["feature_names"] = model.feature_names;
  j["classes"] = model.classes;
  j["standardizer"] = {{"enabled", model.standardizer.enabled},
                       {"mean", model.standardizer.mean},
                       {"sd", model.standardizer.sd}};

  json params;
  if (const auto* rf = std::get_if<RfParams>(&model.params)) {
    params["type"] = "forest";
    json trees = json::array();
    for (const Tree& t : rf->trees) trees.push_back(tree_to_json(t));
    params["trees"] = trees;
  } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    params["type"] = "knn";
    params["x"] = knn->x;
    params["y"] = knn->y;
  } else if (const auto* svm = std::get_if<SvmParams>(&model.params)) {
    params["type"] = "svm";
    params["x"] = svm->x;
    params["y"] = svm->y;
    params["alpha"] = svm->alpha;
    params["b"] = svm->b;
    params["kscale"] = svm->kscale;
  } else if (const auto* svr = std::get_if<SvrParams>(&model.params)) {
    params["type"] = "svr";
    params["x"] = svr->x;
    params["beta"] = svr->beta;
    params["b"] = svr->b;
    params["kscale"] = svr->kscale;
  } else if (const auto* mlp = std::get_if<MlpParams>(&model.params)) {
    params["type"] = "mlp";
    params["w1"] = mlp->w1;
    params["b1"] = mlp->b1;
    params["w2"] = mlp->w2;
    params["b2"] = mlp->b2;
    params["y_mean"] = mlp->y_mean;
    params["y_sd"] = mlp->y_sd;
  } else if (const auto* lin = std::get_if<LinRegParams>(&model.params)) {
    params["type"] = "linreg";
    params["w"] = lin->w;
    params["b"] = lin->b;
    params["y_mean"] = lin->y_mean;
    params["y_sd"] = lin->y_sd;
  }
  j["params"] = params;

  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump(1) << "\n";
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("model file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("model file is not valid JSON: " + path + " (" + e.what() + ")");
  }
  if (j.at("format_version") != kFormatVersion) {
    throw DataError("model file has an unsupported format version");
  }

  TrainedModel model;
  model.config = config_from_json(j.at("config"));
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.classes = j.at("classes").get<std::vector<std::string>>();
  model.standardizer.enabled = j.at("standardizer").at("enabled");
  model.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
  model.standardizer.sd = j.at("standardizer").at("sd").get<std::vector<double>>();

  const json& params = j.at("params");
  const std::string type = params.at("type");
  if (type == "forest") {
    RfParams rf;
    for (const auto& t : params.at("trees")) rf.trees.push_back(tree_from_json(t));
    model.params = std::move(rf);
  } else if (type == "knn") {
    KnnParams p;
    p.x = params.at("x").get<Matrix>();
    p.y = params.at("y").get<std::vector<int>>();
    model.params = std::move(p);
  } else if (type == "svm") {
    SvmParams p;
    p.x = params.at("x").get<Matrix>();
    p.y = params.at("y").get<std::vector<double>>();
    p.alpha = params.at("alpha").get<std::vector<double>>();
    p.b = params.at("b");
    p.kscale = params.at("kscale");
    model.params = std::move(p);
  } else if (type == "svr") {
    SvrParams p;
    p.x = params.at("x").get<Matrix>();
    p.beta = params.at("beta").get<std::vector<double>>();
    p.b = params.at("b");
    p.kscale = params.at("kscale");
    model.params = std::move(p);
  } else if (type == "mlp") {
    MlpParams p;
    p.w1 = params.at("w1").get<Matrix>();
    p.b1 = params.at("b1").get<std::vector<double>>();
    p.w2 = params.at("w2").get<Matrix>();
    p.b2 = params.at("b2").get<std::vector<double>>();
    p.y_mean = params.at("y_mean");
    p.y_sd = params.at("y_sd");
    model.params = std::move(p);
  } else if (type == "linreg") {
    LinRegParams p;
    p.w = params.at("w").get<std::vector<double>>();
    p.b = params.at("b");
    p.y_mean = params.at("y_mean");
    p.y_sd = params.at("y_sd");
    model.params = std::move(p);
  } else {
    throw DataError("model file: unknown params type " + type);
  }
  return model;
}

}  // namespace adspeech
