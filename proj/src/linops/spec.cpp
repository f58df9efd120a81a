#include "mlcs/linops/spec.hpp"

#include <array>
#include <utility>

#include "mlcs/linops/operators.hpp"

namespace mlcs {

namespace {

constexpr std::array<std::pair<OpKind, const char*>, 10> kNames = {{
    {OpKind::Identity, "identity"},
    {OpKind::Dft1d, "dft1d"},
    {OpKind::Dft2d, "dft2d"},
    {OpKind::Fwht, "fwht"},
    {OpKind::Dwt, "dwt"},
    {OpKind::DenseRandom, "dense_random"},
    {OpKind::Kronecker, "kronecker"},
    {OpKind::BlockDiag, "block_diag"},
    {OpKind::Compose, "compose"},
    {OpKind::Flip, "flip"},
}};

OpKind kind_from_name(const std::string& s) {
  for (const auto& [k, n] : kNames)
    if (s == n) return k;
  throw Error(Errc::InvalidSpec, "unknown operator kind '" + s + "'");
}

void invalid(const std::string& msg) { throw Error(Errc::InvalidSpec, msg); }

int parse_family(const nlohmann::json& j) {
  const auto& f = j.at("family");
  if (f.is_number_integer()) return f.get<int>();
  const std::string s = f.get<std::string>();
  if (s.size() < 3 || (s.rfind("DB", 0) != 0 && s.rfind("db", 0) != 0)) invalid("bad wavelet family '" + s + "'");
  return std::stoi(s.substr(2));
}

}  // namespace

const char* op_kind_name(OpKind k) {
  for (const auto& [kk, n] : kNames)
    if (kk == k) return n;
  return "unknown";
}

OperatorSpec OperatorSpec::identity(Index n) {
  OperatorSpec s;
  s.kind = OpKind::Identity;
  s.size = n;
  return s;
}
OperatorSpec OperatorSpec::dft1d(Index n) {
  OperatorSpec s;
  s.kind = OpKind::Dft1d;
  s.size = n;
  return s;
}
OperatorSpec OperatorSpec::dft2d(Index side) {
  OperatorSpec s;
  s.kind = OpKind::Dft2d;
  s.size = side;
  s.dimension = 2;
  return s;
}
OperatorSpec OperatorSpec::fwht(Index side, int dimension) {
  OperatorSpec s;
  s.kind = OpKind::Fwht;
  s.size = side;
  s.dimension = dimension;
  return s;
}
OperatorSpec OperatorSpec::dwt(int family, int levels, Index side, int dimension) {
  OperatorSpec s;
  s.kind = OpKind::Dwt;
  s.family = family;
  s.levels = levels;
  s.size = side;
  s.dimension = dimension;
  return s;
}
OperatorSpec OperatorSpec::dense_random(const std::string& dist, Index rows, Index cols, std::uint64_t seed) {
  OperatorSpec s;
  s.kind = OpKind::DenseRandom;
  s.distribution = dist;
  s.rows = rows;
  s.cols = cols;
  s.seed = seed;
  return s;
}
OperatorSpec OperatorSpec::kronecker(OperatorSpec left, OperatorSpec right) {
  OperatorSpec s;
  s.kind = OpKind::Kronecker;
  s.children = {std::move(left), std::move(right)};
  return s;
}
OperatorSpec OperatorSpec::block_diag(std::vector<OperatorSpec> blocks) {
  OperatorSpec s;
  s.kind = OpKind::BlockDiag;
  s.children = std::move(blocks);
  return s;
}
OperatorSpec OperatorSpec::compose(OperatorSpec outer, OperatorSpec inner) {
  OperatorSpec s;
  s.kind = OpKind::Compose;
  s.children = {std::move(outer), std::move(inner)};
  return s;
}
OperatorSpec OperatorSpec::flip(Index n) {
  OperatorSpec s;
  s.kind = OpKind::Flip;
  s.size = n;
  return s;
}

OperatorPtr build_operator(const OperatorSpec& spec) {
  switch (spec.kind) {
    case OpKind::Identity:
      if (spec.size == 0) invalid("identity: size must be positive");
      return make_op<IdentityOp>(spec.size);
    case OpKind::Flip:
      if (spec.size == 0) invalid("flip: size must be positive");
      return make_op<FlipOp>(spec.size);
    case OpKind::Dft1d:
      return make_op<DftOp>(spec.size, 1);
    case OpKind::Dft2d:
      return make_op<DftOp>(spec.size, 2);
    case OpKind::Fwht:
      return make_op<FwhtOp>(spec.size, spec.dimension);
    case OpKind::Dwt:
      return make_op<DwtOp>(spec.family, spec.levels, spec.size, spec.dimension);
    case OpKind::DenseRandom: {
      RandomDist d;
      if (spec.distribution == "bernoulli") {
        d = RandomDist::Bernoulli;
      } else if (spec.distribution == "gaussian") {
        d = RandomDist::Gaussian;
      } else {
        invalid("dense_random: distribution must be bernoulli or gaussian");
      }
      return make_op<DenseRandomOp>(d, spec.rows, spec.cols, spec.seed);
    }
    case OpKind::Kronecker:
      if (spec.children.size() != 2) invalid("kronecker: needs left and right");
      return make_op<KroneckerOp>(build_operator(spec.children[0]), build_operator(spec.children[1]));
    case OpKind::BlockDiag: {
      std::vector<OperatorPtr> blocks;
      for (const auto& c : spec.children) blocks.push_back(build_operator(c));
      return make_op<BlockDiagOp>(std::move(blocks));
    }
    case OpKind::Compose:
      if (spec.children.size() != 2) invalid("compose: needs outer and inner");
      return make_op<ComposeOp>(build_operator(spec.children[0]), build_operator(spec.children[1]));
  }
  invalid("unhandled operator kind");
  return nullptr;
}

nlohmann::json spec_to_json(const OperatorSpec& s) {
  nlohmann::json j;
  j["kind"] = op_kind_name(s.kind);
  switch (s.kind) {
    case OpKind::Identity:
    case OpKind::Flip:
    case OpKind::Dft1d:
    case OpKind::Dft2d:
      j["size"] = s.size;
      break;
    case OpKind::Fwht:
      j["size"] = s.size;
      j["dimension"] = s.dimension;
      j["ordering"] = "sequency";
      break;
    case OpKind::Dwt:
      j["family"] = "DB" + std::to_string(s.family);
      j["levels"] = s.levels;
      j["size"] = s.size;
      j["dimension"] = s.dimension;
      j["boundary"] = "periodic";
      break;
    case OpKind::DenseRandom:
      j["distribution"] = s.distribution;
      j["rows"] = s.rows;
      j["cols"] = s.cols;
      j["seed"] = s.seed;
      break;
    case OpKind::Kronecker:
      j["left"] = spec_to_json(s.children.at(0));
      j["right"] = spec_to_json(s.children.at(1));
      break;
    case OpKind::Compose:
      j["outer"] = spec_to_json(s.children.at(0));
      j["inner"] = spec_to_json(s.children.at(1));
      break;
    case OpKind::BlockDiag: {
      auto arr = nlohmann::json::array();
      for (const auto& c : s.children) arr.push_back(spec_to_json(c));
      j["blocks"] = arr;
      break;
    }
  }
  return j;
}

OperatorSpec spec_from_json(const nlohmann::json& j) {
  try {
    OperatorSpec s;
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    switch (s.kind) {
      case OpKind::Identity:
      case OpKind::Flip:
      case OpKind::Dft1d:
        s.size = j.at("size").get<Index>();
        break;
      case OpKind::Dft2d:
        s.size = j.at("size").get<Index>();
        s.dimension = 2;
        break;
      case OpKind::Fwht:
        s.size = j.at("size").get<Index>();
        s.dimension = j.value("dimension", 1);
        if (j.value("ordering", std::string("sequency")) != "sequency") invalid("fwht: only sequency ordering");
        break;
      case OpKind::Dwt:
        s.family = parse_family(j);
        s.levels = j.at("levels").get<int>();
        s.size = j.at("size").get<Index>();
        s.dimension = j.value("dimension", 1);
        if (j.value("boundary", std::string("periodic")) != "periodic") invalid("dwt: only periodic boundary");
        break;
      case OpKind::DenseRandom:
        s.distribution = j.value("distribution", std::string("bernoulli"));
        s.rows = j.at("rows").get<Index>();
        s.cols = j.at("cols").get<Index>();
        s.seed = j.value("seed", std::uint64_t{0});
        break;
      case OpKind::Kronecker:
        s.children = {spec_from_json(j.at("left")), spec_from_json(j.at("right"))};
        break;
      case OpKind::Compose:
        s.children = {spec_from_json(j.at("outer")), spec_from_json(j.at("inner"))};
        break;
      case OpKind::BlockDiag:
        for (const auto& c : j.at("blocks")) s.children.push_back(spec_from_json(c));
        break;
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidSpec, std::string("operator spec: ") + e.what());
  }
}

}  // namespace mlcs
