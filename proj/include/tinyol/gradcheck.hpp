#pragma once

#include "tinyol/numeric.hpp"
#include "tinyol/online_head.hpp"

namespace tinyol {

// Central-difference validation of the online update rules, step 1e-3 on
// 32-bit weights with the loss evaluated in 64-bit. Each returns the max
// relative error over all weight and bias coordinates of `instances`
// random head/sample draws.
//
// Pairings: Bce vs the per-output binary cross-entropy loss, MseSigmoid vs
// the half squared-error loss, softmax vs -log p_y. PaperLiteral has no
// loss whose exact gradient it is and is rejected.
double grad_check_regression(GradRule rule, Rng& rng, int instances = 100);
double grad_check_softmax(Rng& rng, int instances = 100);

}  // namespace tinyol
