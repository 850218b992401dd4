#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace motioneval {

double sigmoid(double z);

// Binary cross entropy of one logit, evaluated in the overflow-free form
// max(z, 0) - z * y + log(1 + exp(-|z|)).
double bceWithLogits(double logit, double label);

// H(q): mean BCE over a text grouping (valid or contrastive).
double bceGroup(std::span<const double> logits, std::span<const double> labels);

// sum(w_i * bce_i) / sum(w_i). Equal weights reduce exactly to bceGroup().
// Throws DegenerateBatchError when every weight is zero.
double weightedBceMean(std::span<const double> logits, std::span<const double> labels,
                       std::span<const double> weights);

// Per-sample factor c_i with d(mean)/d(logit_i) = c_i * (sigmoid(z_i) - y_i):
// 1/N without weights (or with all-equal weights), w_i / sum(w) otherwise.
std::vector<double> bceMeanCoefficients(size_t n, std::span<const double> weights);

// L2 = sqrt(H(V)^2 + H(R)^2)
double balancedLoss(double validLoss, double contrastiveLoss);

// Contrastive weight of a pair with similarity alpha.
inline double contrastiveWeight(double alpha) { return 1.0 - alpha; }

// L_f = sqrt(H(V)^2 + H_w(R)^2), H_w(R) the (1 - alpha)-weighted mean of the
// per-sample contrastive BCE values. Throws DegenerateBatchError if all
// alpha_i == 1.
double weightedContrastiveLoss(std::span<const double> contrastiveBce,
                               std::span<const double> alpha);
double weightedLoss(double validLoss, std::span<const double> contrastiveBce,
                    std::span<const double> alpha);

} // namespace motioneval
