#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcs/linops/operator.hpp"

namespace mlcs {

enum class OpKind { Identity, Dft1d, Dft2d, Fwht, Dwt, DenseRandom, Kronecker, BlockDiag, Compose, Flip };

struct OperatorSpec {
  OpKind kind = OpKind::Identity;
  Index size = 0;
  int dimension = 1;
  int family = 1;
  int levels = 0;
  std::string distribution = "bernoulli";
  Index rows = 0;
  Index cols = 0;
  std::uint64_t seed = 0;
  std::vector<OperatorSpec> children;

  static OperatorSpec identity(Index n);
  static OperatorSpec dft1d(Index n);
  static OperatorSpec dft2d(Index side);
  static OperatorSpec fwht(Index side, int dimension = 1);
  static OperatorSpec dwt(int family, int levels, Index side, int dimension = 1);
  static OperatorSpec dense_random(const std::string& dist, Index rows, Index cols, std::uint64_t seed);
  static OperatorSpec kronecker(OperatorSpec left, OperatorSpec right);
  static OperatorSpec block_diag(std::vector<OperatorSpec> blocks);
  static OperatorSpec compose(OperatorSpec outer, OperatorSpec inner);
  static OperatorSpec flip(Index n);
};

OperatorPtr build_operator(const OperatorSpec& spec);

nlohmann::json spec_to_json(const OperatorSpec& spec);
OperatorSpec spec_from_json(const nlohmann::json& j);

const char* op_kind_name(OpKind k);

}  // namespace mlcs
