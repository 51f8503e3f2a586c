#pragma once

#include "dpbalm/model.hpp"

namespace dpbalm {

// w^k together with its predictor wbar^k.
struct PredictionPair {
  Iterate current;
  Iterate predictor;
};

// w^{k+1} = w^k - alpha (w^k - wbar^k); alpha = 1 returns the predictor
// exactly. Throws std::invalid_argument for alpha outside (0, 2).
Iterate correct(const PredictionPair& pair, double alpha);

}  // namespace dpbalm
