#include "srcpool/registry.hpp"

#include <array>
#include <charconv>
#include <set>
#include <stdexcept>

#include "srcpool/operators/dense_trainable.hpp"
#include "srcpool/operators/graclus.hpp"
#include "srcpool/operators/lapool.hpp"
#include "srcpool/operators/ndp.hpp"
#include "srcpool/operators/nmf.hpp"
#include "srcpool/operators/topk.hpp"

namespace srcpool {

namespace {

constexpr std::array<std::string_view, 8> kIds = {"diffpool", "mincut", "nmf",  "lapool",
                                                  "topk",     "sagpool", "ndp", "graclus"};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("bad value for op-arg " + key + ": '" + text + "'");
  return value;
}

void check_keys(std::string_view id, const OperatorConfig& cfg, std::set<std::string> allowed) {
  for (const auto& [key, value] : cfg.args)
    if (!allowed.contains(key))
      throw std::invalid_argument("operator " + std::string(id) + " has no hyperparameter '" + key + "'");
}

Index fixed_k(const OperatorConfig& cfg, GraphShape shape) {
  if (cfg.k) return *cfg.k;
  return *resolve_k(RatioK{cfg.ratio}, shape.num_nodes);
}

TopKConfig topk_config(std::string_view id, const OperatorConfig& cfg) {
  check_keys(id, cfg, {"gate"});
  TopKConfig out{.ratio = cfg.ratio, .gate = GateKind::Tanh, .seed = cfg.seed};
  if (auto it = cfg.args.find("gate"); it != cfg.args.end()) {
    if (it->second == "tanh") out.gate = GateKind::Tanh;
    else if (it->second == "sigmoid") out.gate = GateKind::Sigmoid;
    else throw std::invalid_argument("gate must be tanh or sigmoid");
  }
  return out;
}

}  // namespace

std::span<const std::string_view> operator_ids() { return kIds; }

OperatorDescriptor taxonomy(std::string_view id) {
  // trainable, dense, fixed, hierarchical
  if (id == "diffpool" || id == "mincut")
    return {.trainable = true, .dense = true, .fixed = true, .hierarchical = true, .k_policy = FixedK{}};
  if (id == "topk" || id == "sagpool")
    return {.trainable = true, .dense = false, .fixed = false, .hierarchical = true, .k_policy = RatioK{}};
  if (id == "nmf" || id == "lapool")
    return {.trainable = false, .dense = true, .fixed = false, .hierarchical = true, .k_policy = AutoK{}};
  if (id == "ndp" || id == "graclus")
    return {.trainable = false, .dense = false, .fixed = false, .hierarchical = true, .k_policy = AutoK{}};
  throw std::invalid_argument("unknown operator '" + std::string(id) + "'");
}

std::unique_ptr<PoolingOperator> make_operator(std::string_view id, const OperatorConfig& cfg,
                                               GraphShape shape) {
  if (!(cfg.ratio > 0.0 && cfg.ratio <= 1.0)) throw std::invalid_argument("ratio must lie in (0, 1]");
  if (cfg.k && *cfg.k < 1) throw std::invalid_argument("k must be at least 1");

  if (id == "identity") {
    check_keys(id, cfg, {});
    return std::make_unique<IdentityPooling>();
  }
  if (id == "mincut") {
    check_keys(id, cfg, {"hidden"});
    MinCutConfig mc{.k = fixed_k(cfg, shape), .hidden = 32, .seed = cfg.seed};
    if (auto it = cfg.args.find("hidden"); it != cfg.args.end())
      mc.hidden = parse_number<Index>("hidden", it->second);
    return std::make_unique<MinCutPooling>(shape.num_features, mc);
  }
  if (id == "diffpool") {
    check_keys(id, cfg, {});
    return std::make_unique<DiffPoolPooling>(shape.num_features,
                                             DiffPoolConfig{.k = fixed_k(cfg, shape), .seed = cfg.seed});
  }
  if (id == "topk") return std::make_unique<TopKPooling>(shape.num_features, topk_config(id, cfg));
  if (id == "sagpool") return std::make_unique<SagPooling>(shape.num_features, topk_config(id, cfg));
  if (id == "nmf") {
    check_keys(id, cfg, {"max_iters", "tol"});
    NmfConfig nc{.rank = 1, .ratio = std::nullopt, .max_iters = 500, .tol = 1e-5, .seed = cfg.seed};
    if (cfg.k) nc.rank = *cfg.k;
    else nc.ratio = cfg.ratio;
    if (auto it = cfg.args.find("max_iters"); it != cfg.args.end())
      nc.max_iters = parse_number<int>("max_iters", it->second);
    if (auto it = cfg.args.find("tol"); it != cfg.args.end())
      nc.tol = parse_number<double>("tol", it->second);
    return std::make_unique<NmfPooling>(nc);
  }
  if (id == "lapool") {
    check_keys(id, cfg, {"beta", "norm"});
    LaPoolConfig lc;
    if (auto it = cfg.args.find("beta"); it != cfg.args.end())
      lc.beta = parse_number<double>("beta", it->second);
    if (auto it = cfg.args.find("norm"); it != cfg.args.end()) {
      if (it->second == "inf") lc.norm_order = 0;
      else lc.norm_order = parse_number<int>("norm", it->second);
    }
    return std::make_unique<LaPoolPooling>(lc);
  }
  if (id == "ndp") {
    check_keys(id, cfg, {});
    return std::make_unique<NdpPooling>();
  }
  if (id == "graclus") {
    check_keys(id, cfg, {"shuffle_seed"});
    GraclusConfig gc;
    if (auto it = cfg.args.find("shuffle_seed"); it != cfg.args.end())
      gc.shuffle_seed = parse_number<std::uint64_t>("shuffle_seed", it->second);
    return std::make_unique<GraclusPooling>(gc);
  }
  throw std::invalid_argument("unknown operator '" + std::string(id) + "'");
}

}  // namespace srcpool
